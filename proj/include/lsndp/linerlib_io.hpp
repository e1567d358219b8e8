#pragma once

// Reading LINERLIB-style instance directories and JSON service schedules.
//
// Instance directories hold tab-separated tables with a header row. Columns are
// matched by header name (case and punctuation insensitive), so reordered or
// extra columns are tolerated. The instance's port set is every port referenced
// by its demand file, in the order of the global ports table.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsndp/error.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

struct ParseOptions {
  int max_services = kDefaultMaxServices;
  // Applied to fuel columns whose header states tons per day.
  double bunker_price = 600.0;
  double reject_penalty = kDefaultRejectPenalty;
};

namespace io_detail {

inline std::string header_key(std::string_view raw) {
  std::string key;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

class TsvTable {
 public:
  struct Row {
    std::size_t line = 0;
    std::vector<std::string> cells;
  };

  explicit TsvTable(const std::filesystem::path& file) : file_(file.string()) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open " + file_);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      std::vector<std::string> cells;
      std::size_t start = 0;
      while (true) {
        std::size_t tab = line.find('\t', start);
        cells.emplace_back(trim(std::string_view(line).substr(start, tab - start)));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (!have_header) {
        for (const auto& c : cells) header_.push_back(header_key(c));
        have_header = true;
      } else {
        rows_.push_back({line_no, std::move(cells)});
      }
    }
    if (!have_header) throw ParseError(file_, 1, 1, "missing header row");
  }

  const std::string& file() const { return file_; }
  const std::vector<Row>& rows() const { return rows_; }

  // Index of the first column whose header matches one of `aliases`.
  std::optional<std::size_t> find(std::initializer_list<std::string_view> aliases) const {
    for (auto alias : aliases)
      for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == alias) return i;
    return std::nullopt;
  }

  std::size_t require(std::initializer_list<std::string_view> aliases) const {
    if (auto i = find(aliases)) return *i;
    throw ParseError(file_, 1, 1, "missing column '" + std::string(*aliases.begin()) + "'");
  }

  const std::string& header(std::size_t column) const { return header_.at(column); }

  const std::string& cell(const Row& row, std::size_t column) const {
    if (column >= row.cells.size())
      throw ParseError(file_, row.line, column + 1, "missing field");
    return row.cells[column];
  }

  double number(const Row& row, std::size_t column) const {
    const std::string& text = cell(row, column);
    double value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last)
      throw ParseError(file_, row.line, column + 1, "malformed number '" + text + "'");
    return value;
  }

 private:
  std::string file_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

// Finds `<stem>` with an optional .csv/.tsv/.txt suffix in `dir` or `dir/data`.
inline std::optional<std::filesystem::path> locate(const std::filesystem::path& dir,
                                                   const std::string& stem) {
  for (const auto& base : {dir, dir / "data"}) {
    for (const char* ext : {".csv", ".tsv", ".txt", ""}) {
      auto candidate = base / (stem + ext);
      std::error_code ec;
      if (std::filesystem::is_regular_file(candidate, ec)) return candidate;
    }
  }
  return std::nullopt;
}

inline std::filesystem::path require_file(const std::filesystem::path& dir,
                                          const std::string& stem) {
  if (auto p = locate(dir, stem)) return *p;
  throw InputError("missing instance file '" + stem + "' in " + dir.string());
}

// Perturbed instances are named `<base>_p<level>_<k>` and share the base fleet.
inline std::optional<std::string> perturbed_base_name(std::string_view name) {
  auto under = name.rfind('_');
  if (under == std::string_view::npos || under + 1 >= name.size()) return std::nullopt;
  for (char c : name.substr(under + 1))
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  auto marker = name.substr(0, under).rfind("_p");
  if (marker == std::string_view::npos) return std::nullopt;
  return std::string(name.substr(0, marker));
}

inline bool header_in_tons(const std::string& key) {
  return key.find("ton") != std::string::npos;
}

}  // namespace io_detail

inline Instance parse_instance(const std::filesystem::path& directory,
                               const std::string& instance_name,
                               const ParseOptions& options = {}) {
  using io_detail::TsvTable;
  namespace fs = std::filesystem;

  const fs::path ports_file = io_detail::require_file(directory, "ports");
  const fs::path dist_file = io_detail::require_file(directory, "dist_dense");
  const fs::path fleet_data_file = io_detail::require_file(directory, "fleet_data");
  const fs::path demand_file = io_detail::require_file(directory, "Demand_" + instance_name);
  fs::path fleet_file;
  if (auto f = io_detail::locate(directory, "fleet_" + instance_name)) {
    fleet_file = *f;
  } else if (auto base = io_detail::perturbed_base_name(instance_name);
             base && io_detail::locate(directory, "fleet_" + *base)) {
    fleet_file = *io_detail::locate(directory, "fleet_" + *base);
  } else {
    fleet_file = io_detail::require_file(directory, "fleet_" + instance_name);
  }

  // Global port table.
  TsvTable ports_table(ports_file);
  const auto c_id = ports_table.require({"unlocode", "id", "port"});
  const auto c_name = ports_table.find({"name", "portname"});
  const auto c_lat = ports_table.require({"latitude", "lat"});
  const auto c_lon = ports_table.require({"longitude", "lon", "long"});
  const auto c_move = ports_table.require({"costperfull", "movecost", "loadunloadcost"});
  const auto c_trans = ports_table.require({"costperfulltrnsf", "transshipmentcost"});
  const auto c_fixed = ports_table.require({"portcallcostfixed", "fixedcallcost"});
  const auto c_var = ports_table.require({"portcallcostperffe", "variablecallcost"});
  std::vector<PortSpec> all_ports;
  std::map<std::string, std::size_t> all_lookup;
  for (const auto& row : ports_table.rows()) {
    PortSpec p;
    p.id = normalize_port_id(ports_table.cell(row, c_id));
    if (p.id.empty()) throw ParseError(ports_table.file(), row.line, c_id + 1, "empty port id");
    if (c_name) p.name = ports_table.cell(row, *c_name);
    p.latitude = ports_table.number(row, c_lat);
    p.longitude = ports_table.number(row, c_lon);
    p.move_cost = ports_table.number(row, c_move);
    p.transshipment_cost = ports_table.number(row, c_trans);
    p.fixed_call_cost = ports_table.number(row, c_fixed);
    p.variable_call_cost = ports_table.number(row, c_var);
    if (p.move_cost < 0 || p.transshipment_cost < 0 || p.fixed_call_cost < 0 ||
        p.variable_call_cost < 0)
      throw ParseError(ports_table.file(), row.line, 1, "negative port cost for " + p.id);
    if (!all_lookup.emplace(p.id, all_ports.size()).second)
      throw ParseError(ports_table.file(), row.line, c_id + 1, "duplicate port id " + p.id);
    all_ports.push_back(std::move(p));
  }

  auto resolve_global = [&](const TsvTable& table, const TsvTable::Row& row,
                            std::size_t column) -> std::size_t {
    const std::string id = normalize_port_id(table.cell(row, column));
    auto it = all_lookup.find(id);
    if (it == all_lookup.end())
      throw ParseError(table.file(), row.line, column + 1, "unknown port id '" + id + "'");
    return it->second;
  };

  // Demands define the instance's port set.
  TsvTable demand_table(demand_file);
  const auto c_o = demand_table.require({"origin", "from"});
  const auto c_d = demand_table.require({"destination", "to"});
  const auto c_q = demand_table.require({"ffeperweek", "quantity", "ffe"});
  const auto c_r = demand_table.require({"revenue1", "revenue"});
  struct RawDemand {
    std::size_t origin, destination;
    double revenue, quantity;
  };
  std::vector<RawDemand> raw_demands;
  std::set<std::size_t> used;
  for (const auto& row : demand_table.rows()) {
    RawDemand d{resolve_global(demand_table, row, c_o), resolve_global(demand_table, row, c_d),
                demand_table.number(row, c_r), demand_table.number(row, c_q)};
    if (d.origin == d.destination)
      throw ParseError(demand_table.file(), row.line, c_d + 1, "origin equals destination");
    if (d.quantity < 0)
      throw ParseError(demand_table.file(), row.line, c_q + 1, "negative quantity");
    used.insert(d.origin);
    used.insert(d.destination);
    raw_demands.push_back(d);
  }

  std::vector<PortSpec> ports;
  std::vector<std::optional<PortIndex>> local(all_ports.size());
  for (std::size_t g : used) {  // std::set iterates in global-table order
    local[g] = ports.size();
    ports.push_back(all_ports[g]);
  }

  std::vector<Demand> demands;
  demands.reserve(raw_demands.size());
  for (const auto& r : raw_demands)
    demands.push_back({*local[r.origin], *local[r.destination], r.revenue, r.quantity,
                       options.reject_penalty});

  // Distances restricted to the instance's ports.
  TsvTable dist_table(dist_file);
  const auto c_from = dist_table.require({"fromunlocode", "from", "origin"});
  const auto c_to = dist_table.require({"tounlocode", "to", "destination"});
  const auto c_dist = dist_table.require({"distance", "distancenm"});
  const auto c_draft = dist_table.find({"draft"});
  const auto c_suez = dist_table.require({"issuez", "suez"});
  const auto c_panama = dist_table.require({"ispanama", "panama"});
  std::vector<DistanceEntry> distances;
  std::set<std::pair<PortIndex, PortIndex>> seen;
  for (const auto& row : dist_table.rows()) {
    const auto from = local[resolve_global(dist_table, row, c_from)];
    const auto to = local[resolve_global(dist_table, row, c_to)];
    if (!from || !to || *from == *to) continue;
    DistanceEntry e;
    e.origin = *from;
    e.destination = *to;
    e.distance = dist_table.number(row, c_dist);
    if (e.distance < 0)
      throw ParseError(dist_table.file(), row.line, c_dist + 1, "negative distance");
    if (c_draft) e.draft = dist_table.number(row, *c_draft);
    e.suez = dist_table.number(row, c_suez) != 0;
    e.panama = dist_table.number(row, c_panama) != 0;
    if (!seen.emplace(e.origin, e.destination).second)
      throw ParseError(dist_table.file(), row.line, 1,
                       "duplicate distance row " + ports[e.origin].id + "->" +
                           ports[e.destination].id);
    distances.push_back(e);
  }
  for (PortIndex i = 0; i < ports.size(); ++i)
    for (PortIndex j = 0; j < ports.size(); ++j)
      if (i != j && !seen.count({i, j}))
        throw InputError(dist_table.file() + ": no distance row for " + ports[i].id + "->" +
                         ports[j].id);

  // Vessel classes and the instance's fleet counts.
  TsvTable class_table(fleet_data_file);
  const auto c_cname = class_table.require({"vesselclass", "classname", "name"});
  const auto c_cap = class_table.require({"capacityffe", "capacity"});
  const auto c_tc = class_table.require({"tcratedailyfixedcost", "tcrate", "tcratedaily"});
  const auto c_vdraft = class_table.find({"draft"});
  const auto c_min = class_table.find({"minspeed"});
  const auto c_max = class_table.find({"maxspeed"});
  const auto c_design = class_table.require({"designspeed"});
  const auto c_fuel = class_table.require(
      {"bunkertonperdayatdesignspeed", "fuelatdesign", "fueldesign", "fuelatdesignspeed"});
  const auto c_idle = class_table.require({"idleconsumptiontonday", "fuelidle", "idlefuel"});
  const auto c_pfee = class_table.require({"panamafee"});
  const auto c_sfee = class_table.require({"suezfee"});
  const double fuel_scale =
      io_detail::header_in_tons(class_table.header(c_fuel)) ? options.bunker_price : 1.0;
  const double idle_scale =
      io_detail::header_in_tons(class_table.header(c_idle)) ? options.bunker_price : 1.0;
  std::map<std::string, VesselClass> classes;
  for (const auto& row : class_table.rows()) {
    VesselClass v;
    v.name = class_table.cell(row, c_cname);
    v.capacity = class_table.number(row, c_cap);
    if (!(v.capacity > 0))
      throw ParseError(class_table.file(), row.line, c_cap + 1, "capacity must be positive");
    v.tc_rate = class_table.number(row, c_tc);
    if (c_vdraft) v.draft = class_table.number(row, *c_vdraft);
    if (c_min) v.min_speed = class_table.number(row, *c_min);
    if (c_max) v.max_speed = class_table.number(row, *c_max);
    v.design_speed = class_table.number(row, c_design);
    if (!(v.design_speed > 0))
      throw ParseError(class_table.file(), row.line, c_design + 1,
                       "design speed must be positive");
    v.fuel_design = class_table.number(row, c_fuel) * fuel_scale;
    v.fuel_idle = class_table.number(row, c_idle) * idle_scale;
    v.panama_fee = class_table.number(row, c_pfee);
    v.suez_fee = class_table.number(row, c_sfee);
    classes[v.name] = v;
  }

  TsvTable fleet_table(fleet_file);
  const auto c_fname = fleet_table.require({"vesselclass", "classname", "name"});
  const auto c_count = fleet_table.require({"quantity", "count"});
  std::vector<VesselClass> fleet;
  for (const auto& row : fleet_table.rows()) {
    const std::string& name = fleet_table.cell(row, c_fname);
    auto it = classes.find(name);
    if (it == classes.end())
      throw ParseError(fleet_table.file(), row.line, c_fname + 1,
                       "unknown vessel class '" + name + "'");
    const double count = fleet_table.number(row, c_count);
    if (count < 0 || count != static_cast<double>(static_cast<int>(count)))
      throw ParseError(fleet_table.file(), row.line, c_count + 1,
                       "vessel count must be a non-negative integer");
    VesselClass v = it->second;
    v.count = static_cast<int>(count);
    fleet.push_back(std::move(v));
  }

  return Instance(instance_name, std::move(ports), std::move(fleet), std::move(distances),
                  std::move(demands), options.max_services);
}

inline Instance parse_instance(const std::filesystem::path& directory,
                               const std::string& instance_name, int max_services) {
  ParseOptions options;
  options.max_services = max_services;
  return parse_instance(directory, instance_name, options);
}

// Shortest decimal text that parses back to exactly `value`.
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw InvariantError("number formatting failed");
  return std::string(buf, ptr);
}

// Canonical demand table: Origin, Destination, FFEPerWeek, Revenue_1.
inline void write_demands(const Instance& instance, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write " + file.string());
  out << "Origin\tDestination\tFFEPerWeek\tRevenue_1\n";
  for (const auto& d : instance.demands()) {
    out << instance.port(d.origin).id << '\t' << instance.port(d.destination).id << '\t'
        << format_number(d.quantity) << '\t' << format_number(d.revenue) << '\n';
  }
  if (!out) throw InputError("I/O failure writing " + file.string());
}

// A schedule entry before validation: class name plus port ids as written.
struct RawRotation {
  std::string vessel_class;
  std::vector<std::string> ports;
};

inline std::vector<RawRotation> read_rotations(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open schedule " + file.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(file.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw InputError(file.string() + ": schedule must be a JSON array");
  std::vector<RawRotation> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& entry = doc[i];
    const std::string where = file.string() + ": entry " + std::to_string(i);
    if (!entry.is_object() || !entry.contains("vessel_class") || !entry.contains("ports") ||
        !entry["vessel_class"].is_string() || !entry["ports"].is_array())
      throw InputError(where + ": expected {\"vessel_class\": str, \"ports\": [str...]}");
    RawRotation r;
    r.vessel_class = entry["vessel_class"].get<std::string>();
    for (const auto& p : entry["ports"]) {
      if (!p.is_string()) throw InputError(where + ": port ids must be strings");
      r.ports.push_back(normalize_port_id(p.get<std::string>()));
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline ClassIndex resolve_class(const Instance& instance, const std::string& name) {
  if (auto c = instance.find_class(name)) return *c;
  throw InputError("unknown vessel class '" + name + "'");
}

inline std::vector<PortIndex> resolve_ports(const Instance& instance,
                                            const std::vector<std::string>& ids) {
  std::vector<PortIndex> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto p = instance.find_port(id);
    if (!p) throw InputError("unknown port '" + id + "' in instance " + instance.name());
    out.push_back(*p);
  }
  return out;
}

inline std::vector<Service> load_schedule(const std::filesystem::path& file,
                                          const Instance& instance) {
  std::vector<Service> services;
  for (const auto& raw : read_rotations(file)) {
    services.push_back(make_service(instance, resolve_class(instance, raw.vessel_class),
                                    resolve_ports(instance, raw.ports)));
  }
  return services;
}

inline nlohmann::json schedule_to_json(std::span<const Service> services,
                                       const Instance& instance) {
  auto doc = nlohmann::json::array();
  for (const auto& s : services) {
    if (s.vessel_class >= instance.fleet().size())
      throw InputError("service references an unknown vessel class");
    auto ports = nlohmann::json::array();
    for (PortIndex p : s.rotation) {
      if (p >= instance.port_count()) throw InputError("service references an unknown port");
      ports.push_back(instance.port(p).id);
    }
    doc.push_back({{"vessel_class", instance.vessel_class(s.vessel_class).name},
                   {"ports", std::move(ports)}});
  }
  return doc;
}

inline void write_schedule(std::span<const Service> services, const Instance& instance,
                           const std::filesystem::path& file) {
  // Validate fully before touching the file.
  const auto doc = schedule_to_json(services, instance);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write " + file.string());
  out << doc.dump(2) << '\n';
  if (!out) throw InputError("I/O failure writing " + file.string());
}

}  // namespace lsndp
