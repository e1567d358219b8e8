#pragma once

// Profit model. Every term is in $ per week: demands are weekly, and daily
// rates (time charter, fuel) are scaled by 7 where they accrue continuously.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsndp/error.hpp"
#include "lsndp/mcf.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

// How rotation-level voyage costs (port calls, fuel) are charged.
//   kPerRotationWeek: the n vessels of a weekly service jointly complete one
//                     rotation per week, so each rotation's costs are paid once.
//   kLiteral:         port-call and fuel terms are multiplied by the service's
//                     fractional vessel count.
enum class VoyageCostMode { kPerRotationWeek, kLiteral };

inline std::string_view to_string(VoyageCostMode mode) {
  return mode == VoyageCostMode::kLiteral ? "literal" : "per_rotation_week";
}

inline VoyageCostMode parse_voyage_cost_mode(std::string_view text) {
  if (text == "per_rotation_week") return VoyageCostMode::kPerRotationWeek;
  if (text == "literal") return VoyageCostMode::kLiteral;
  throw InputError("unknown voyage cost mode '" + std::string(text) + "'");
}

struct CostConfig {
  VoyageCostMode voyage_cost_mode = VoyageCostMode::kPerRotationWeek;
};

inline double vessels_required(const Service& service, const Instance& instance) {
  return rotation_days(instance, instance.vessel_class(service.vessel_class), service.rotation) / 7.0;
}

struct FixedCost {
  double service = 0;
  double unused = 0;  // negative when spare vessels are chartered out
  double port_call = 0;
  double fuel = 0;
  double canal = 0;

  double voyage() const { return port_call + fuel + canal; }
  double total() const { return service + unused + voyage(); }
};

// Fractional vessels in use per fleet class.
inline std::vector<double> vessels_used_by_class(std::span<const Service> services,
                                                 const Instance& instance) {
  std::vector<double> used(instance.fleet().size(), 0.0);
  for (const auto& s : services) {
    if (s.vessel_class >= used.size()) throw InputError("service uses a vessel class absent from the fleet");
    used[s.vessel_class] += vessels_required(s, instance);
  }
  return used;
}

inline FixedCost fixed_cost(std::span<const Service> services, const Instance& instance,
                            const CostConfig& config = {}) {
  FixedCost cost;
  const auto used = vessels_used_by_class(services, instance);
  for (const auto& s : services) {
    const VesselClass& v = instance.vessel_class(s.vessel_class);
    const double n = vessels_required(s, instance);
    cost.service += n * v.tc_rate * 7.0;

    double calls = 0;
    double miles = 0;
    double canal = 0;
    for (std::size_t i = 0; i < s.rotation.size(); ++i) {
      const PortSpec& p = instance.port(s.rotation[i]);
      calls += p.fixed_call_cost + p.variable_call_cost * v.capacity;
      const auto [from, to] = s.leg(i);
      const DistanceEntry* e = instance.distance(from, to);
      if (!e) throw InputError("service leg without distance entry");
      miles += e->distance;
      canal += (e->suez ? v.suez_fee : 0.0) + (e->panama ? v.panama_fee : 0.0);
    }
    const double sailing_days = miles / (v.design_speed * 24.0);
    const double fuel =
        sailing_days * v.fuel_design + static_cast<double>(s.rotation.size()) * v.fuel_idle;
    const double factor = config.voyage_cost_mode == VoyageCostMode::kLiteral ? n : 1.0;
    cost.port_call += calls * factor;
    cost.fuel += fuel * factor;
    cost.canal += canal;
  }
  for (ClassIndex c = 0; c < used.size(); ++c) {
    const VesselClass& v = instance.vessel_class(c);
    cost.unused -= (static_cast<double>(v.count) - used[c]) * v.tc_rate * 7.0;
  }
  return cost;
}

struct VariableTerms {
  double revenue = 0;
  double reject_penalty = 0;
  double load_unload = 0;
  double transshipment = 0;

  double handle() const { return load_unload + transshipment; }
};

inline VariableTerms variable_terms(const Instance& instance, const FlowAssignment& flow) {
  VariableTerms terms;
  const auto demands = instance.demands();
  for (std::size_t d = 0; d < demands.size(); ++d) {
    terms.revenue += demands[d].revenue * flow.served[d];
    terms.reject_penalty += demands[d].reject_penalty * flow.missed[d];
    for (const auto& f : flow.flows[d]) {
      const GraphEdge& e = flow.graph->edge(f.edge);
      switch (e.kind) {
        case EdgeKind::kLoad:
        case EdgeKind::kUnload: terms.load_unload += e.weight * f.amount; break;
        case EdgeKind::kTransship: terms.transshipment += e.weight * f.amount; break;
        case EdgeKind::kSail: break;
      }
    }
  }
  return terms;
}

struct ProfitBreakdown {
  double revenue = 0;
  double reject_penalty = 0;
  double handling_load_unload = 0;
  double handling_transshipment = 0;
  double service_cost = 0;
  double unused_vessel = 0;
  double voyage_port_call = 0;
  double voyage_fuel = 0;
  double voyage_canal = 0;
  double eta = 0;
  std::vector<double> vessels_used;  // per fleet class

  double handle() const { return handling_load_unload + handling_transshipment; }
  double voyage() const { return voyage_port_call + voyage_fuel + voyage_canal; }
  double ndp() const { return service_cost + unused_vessel + voyage(); }
  double vessels_used_total() const {
    double total = 0;
    for (double v : vessels_used) total += v;
    return total;
  }
  // The profit identity over the stored parts.
  double signed_sum() const { return revenue - reject_penalty - handle() - ndp(); }

  static ProfitBreakdown assemble(const VariableTerms& var, const FixedCost& fixed,
                                  std::vector<double> vessels_used) {
    ProfitBreakdown b;
    b.revenue = var.revenue;
    b.reject_penalty = var.reject_penalty;
    b.handling_load_unload = var.load_unload;
    b.handling_transshipment = var.transshipment;
    b.service_cost = fixed.service;
    b.unused_vessel = fixed.unused;
    b.voyage_port_call = fixed.port_call;
    b.voyage_fuel = fixed.fuel;
    b.voyage_canal = fixed.canal;
    b.vessels_used = std::move(vessels_used);
    b.eta = b.signed_sum();
    return b;
  }
};

struct Evaluation {
  FlowAssignment flow;
  ProfitBreakdown breakdown;
};

inline Evaluation evaluate(const Instance& instance, std::span<const Service> services,
                           const CostConfig& config = {}) {
  Evaluation result;
  result.flow = solve_mcf(instance, services);
  result.breakdown =
      ProfitBreakdown::assemble(variable_terms(instance, result.flow),
                                fixed_cost(services, instance, config),
                                vessels_used_by_class(services, instance));
  return result;
}

inline ProfitBreakdown profit(const Instance& instance, std::span<const Service> services,
                              const CostConfig& config = {}) {
  return evaluate(instance, services, config).breakdown;
}

}  // namespace lsndp
