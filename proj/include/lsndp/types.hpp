#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lsndp/error.hpp"

namespace lsndp {

using PortIndex = std::size_t;
using ClassIndex = std::size_t;

inline constexpr double kDefaultRejectPenalty = 1000.0;
inline constexpr int kDefaultMaxServices = 20;
inline constexpr std::size_t kVesselFeatureCount = 11;

inline std::string normalize_port_id(std::string_view raw) {
  std::string id;
  id.reserve(raw.size());
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c)))
      id.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return id;
}

struct PortSpec {
  std::string id;  // UNLOCODE, upper case
  std::string name;
  double fixed_call_cost = 0;      // $ per call
  double variable_call_cost = 0;   // $ per FFE of vessel capacity per call
  double transshipment_cost = 0;   // $ per FFE
  double move_cost = 0;            // $ per FFE loaded or unloaded
  double latitude = 0;
  double longitude = 0;

  bool operator==(const PortSpec&) const = default;
};

struct VesselClass {
  std::string name;
  double capacity = 0;      // FFE
  int count = 0;            // vessels available
  double tc_rate = 0;       // $ per day
  double draft = 0;
  double min_speed = 0;
  double max_speed = 0;
  double design_speed = 0;  // knots
  double fuel_design = 0;   // $ per day sailing at design speed
  double fuel_idle = 0;     // $ per day idle in port
  double panama_fee = 0;    // $ per transit
  double suez_fee = 0;      // $ per transit

  // The per-class feature row; `remaining` is the live fleet count.
  std::array<double, kVesselFeatureCount> features(double remaining) const {
    return {capacity, tc_rate,   draft,      min_speed,  max_speed, design_speed,
            fuel_design, fuel_idle, panama_fee, suez_fee, remaining};
  }

  bool operator==(const VesselClass&) const = default;
};

struct DistanceEntry {
  PortIndex origin = 0;
  PortIndex destination = 0;
  double distance = 0;  // nautical miles
  double draft = 0;
  bool suez = false;
  bool panama = false;

  bool operator==(const DistanceEntry&) const = default;
};

struct Demand {
  PortIndex origin = 0;
  PortIndex destination = 0;
  double revenue = 0;   // $ per FFE
  double quantity = 0;  // FFE per week
  double reject_penalty = kDefaultRejectPenalty;

  bool operator==(const Demand&) const = default;
};

// Immutable problem datum. Distances are stored densely over the instance's
// ports, so every lookup is O(1).
class Instance {
 public:
  Instance() = default;

  Instance(std::string name, std::vector<PortSpec> ports,
           std::vector<VesselClass> fleet,
           std::vector<DistanceEntry> distances, std::vector<Demand> demands,
           int max_services = kDefaultMaxServices)
      : name_(std::move(name)),
        ports_(std::move(ports)),
        fleet_(std::move(fleet)),
        demands_(std::move(demands)),
        max_services_(max_services) {
    if (max_services_ < 1) throw InputError("max_services must be positive");
    for (PortIndex i = 0; i < ports_.size(); ++i) {
      ports_[i].id = normalize_port_id(ports_[i].id);
      if (!port_lookup_.emplace(ports_[i].id, i).second)
        throw InputError("duplicate port id " + ports_[i].id);
    }
    for (const auto& v : fleet_) {
      if (!(v.capacity > 0)) throw InputError("vessel class " + v.name + " has non-positive capacity");
      if (v.count < 0) throw InputError("vessel class " + v.name + " has negative count");
    }
    const std::size_t n = ports_.size();
    distance_table_.assign(n * n, std::nullopt);
    for (const auto& e : distances) {
      if (e.origin >= n || e.destination >= n)
        throw InputError("distance entry references a port outside the instance");
      if (e.distance < 0) throw InputError("negative distance");
      auto& slot = distance_table_[e.origin * n + e.destination];
      if (slot) {
        throw InputError("duplicate distance entry " + ports_[e.origin].id + "->" +
                         ports_[e.destination].id);
      }
      slot = e;
    }
    for (const auto& d : demands_) {
      if (d.origin >= n || d.destination >= n)
        throw InputError("demand references a port outside the instance");
      if (d.origin == d.destination)
        throw InputError("demand with identical origin and destination " + ports_[d.origin].id);
      if (d.quantity < 0) throw InputError("negative demand quantity");
    }
  }

  const std::string& name() const { return name_; }
  std::span<const PortSpec> ports() const { return ports_; }
  std::span<const VesselClass> fleet() const { return fleet_; }
  std::span<const Demand> demands() const { return demands_; }
  int max_services() const { return max_services_; }
  std::size_t port_count() const { return ports_.size(); }

  const PortSpec& port(PortIndex i) const { return ports_.at(i); }
  const VesselClass& vessel_class(ClassIndex i) const { return fleet_.at(i); }

  std::optional<PortIndex> find_port(std::string_view id) const {
    auto it = port_lookup_.find(normalize_port_id(id));
    if (it == port_lookup_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<ClassIndex> find_class(std::string_view name) const {
    for (ClassIndex i = 0; i < fleet_.size(); ++i)
      if (fleet_[i].name == name) return i;
    return std::nullopt;
  }

  // Nullptr when no entry exists for the ordered pair.
  const DistanceEntry* distance(PortIndex from, PortIndex to) const {
    const std::size_t n = ports_.size();
    if (from >= n || to >= n) return nullptr;
    const auto& slot = distance_table_[from * n + to];
    return slot ? &*slot : nullptr;
  }

  std::vector<DistanceEntry> distance_entries() const {
    std::vector<DistanceEntry> out;
    for (const auto& slot : distance_table_)
      if (slot) out.push_back(*slot);
    return out;
  }

  double total_demand() const {
    double total = 0;
    for (const auto& d : demands_) total += d.quantity;
    return total;
  }

  // Same instance with a replaced demand list (used by perturbation).
  Instance with_demands(std::vector<Demand> demands, std::string name) const {
    Instance copy = *this;
    copy.name_ = std::move(name);
    copy.demands_ = std::move(demands);
    return copy;
  }

  Instance with_max_services(int max_services) const {
    if (max_services < 1) throw InputError("max_services must be positive");
    Instance copy = *this;
    copy.max_services_ = max_services;
    return copy;
  }

  bool operator==(const Instance& other) const {
    return name_ == other.name_ && ports_ == other.ports_ && fleet_ == other.fleet_ &&
           demands_ == other.demands_ && max_services_ == other.max_services_ &&
           distance_table_ == other.distance_table_;
  }

 private:
  std::string name_;
  std::vector<PortSpec> ports_;
  std::vector<VesselClass> fleet_;
  std::vector<Demand> demands_;
  int max_services_ = kDefaultMaxServices;
  std::vector<std::optional<DistanceEntry>> distance_table_;
  std::unordered_map<std::string, PortIndex> port_lookup_;
};

// Round-trip duration of a rotation in days: sailing at design speed plus one
// day per port call.
inline double rotation_days(const Instance& instance, const VesselClass& vessel,
                            std::span<const PortIndex> rotation) {
  if (!(vessel.design_speed > 0))
    throw InputError("vessel class " + vessel.name + " has zero design speed");
  double miles = 0;
  for (std::size_t i = 0; i < rotation.size(); ++i) {
    const PortIndex from = rotation[i];
    const PortIndex to = rotation[(i + 1) % rotation.size()];
    const DistanceEntry* e = instance.distance(from, to);
    if (!e) {
      throw InputError("no distance entry for leg " + instance.port(from).id + "->" +
                       instance.port(to).id);
    }
    miles += e->distance;
  }
  return miles / (vessel.design_speed * 24.0) + static_cast<double>(rotation.size());
}

// One simple weekly rotation. Construct through make_service so the derived
// vessel count and invariants are always in place.
struct Service {
  ClassIndex vessel_class = 0;
  std::vector<PortIndex> rotation;
  double n_vessels = 0;

  std::size_t leg_count() const { return rotation.size(); }
  std::pair<PortIndex, PortIndex> leg(std::size_t i) const {
    return {rotation[i], rotation[(i + 1) % rotation.size()]};
  }
  std::vector<std::pair<PortIndex, PortIndex>> legs() const {
    std::vector<std::pair<PortIndex, PortIndex>> out;
    out.reserve(rotation.size());
    for (std::size_t i = 0; i < rotation.size(); ++i) out.push_back(leg(i));
    return out;
  }

  bool operator==(const Service&) const = default;
};

inline Service make_service(const Instance& instance, ClassIndex vessel_class,
                            std::vector<PortIndex> rotation) {
  if (vessel_class >= instance.fleet().size())
    throw InputError("unknown vessel class index " + std::to_string(vessel_class));
  if (rotation.size() < 2) throw InputError("a rotation needs at least 2 ports");
  for (PortIndex p : rotation)
    if (p >= instance.port_count()) throw InputError("rotation references an unknown port");
  std::vector<PortIndex> sorted = rotation;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    auto dup = *std::adjacent_find(sorted.begin(), sorted.end());
    throw InputError("port " + instance.port(dup).id + " repeats within a rotation");
  }
  Service s;
  s.vessel_class = vessel_class;
  s.rotation = std::move(rotation);
  s.n_vessels = rotation_days(instance, instance.vessel_class(vessel_class), s.rotation) / 7.0;
  return s;
}

}  // namespace lsndp
