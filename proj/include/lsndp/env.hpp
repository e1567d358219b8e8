#pragma once

// Network design as a sequential decision process: each step appends one whole
// service, the flow is re-solved on the full service set and the reward is the
// profit change scaled by the first step's profit magnitude.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsndp/costs.hpp"
#include "lsndp/error.hpp"
#include "lsndp/mcf.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

struct Action {
  ClassIndex vessel = 0;
  std::vector<PortIndex> ports;
};

struct EnvState {
  int t = 0;
  std::uint64_t seed = 0;
  std::vector<Service> services;
  std::vector<double> remaining_vessels;  // per class; negative when overdrawn
  std::vector<double> remaining_demand;   // per demand, unserved after the last flow solve
  std::vector<double> profit_history;     // eta_0 .. eta_t
  std::shared_ptr<const FlowAssignment> flow;
  ProfitBreakdown breakdown;
  bool done = false;
};

struct StepResult {
  EnvState state;
  double reward = 0;
  bool done = false;
};

// Dense row-major feature matrices.
struct StateFeatures {
  std::size_t port_rows = 0;  // P + 1 (last row is the global node)
  std::size_t edge_rows = 0;  // 6 + max_services
  std::size_t edge_count = 0;
  std::size_t vessel_rows = 0;
  std::vector<double> ports;    // port_rows x 2: incoming, outgoing remaining demand
  std::vector<double> edges;    // edge_rows x edge_count
  std::vector<double> vessels;  // vessel_rows x kVesselFeatureCount

  double edge_at(std::size_t row, std::size_t edge) const { return edges[row * edge_count + edge]; }
};

// Static edge feature rows; the rest are dynamic.
enum EdgeFeatureRow : std::size_t {
  kEdgeOrigin = 0,
  kEdgeDestination = 1,
  kEdgeDistance = 2,
  kEdgeRevenue = 3,
  kEdgeRemainingDemand = 4,
  kEdgeRemainingCapacity = 5,
  kEdgeServiceRows = 6,
};

class Environment {
 public:
  explicit Environment(std::shared_ptr<const Instance> instance, CostConfig costs = {})
      : instance_(std::move(instance)), costs_(costs) {
    const Instance& in = *instance_;
    const std::size_t P = in.port_count();
    edge_lookup_.assign(P * P, kNoEdge);
    for (PortIndex o = 0; o < P; ++o) {
      for (PortIndex d = 0; d < P; ++d) {
        if (o == d || !in.distance(o, d)) continue;
        edge_lookup_[o * P + d] = edges_.size();
        edges_.push_back({o, d});
      }
    }
    edge_revenue_.assign(edges_.size(), 0.0);
    std::vector<char> seen(edges_.size(), 0);
    demand_edge_.reserve(in.demands().size());
    for (const auto& demand : in.demands()) {
      const std::size_t e = edge_lookup_[demand.origin * P + demand.destination];
      demand_edge_.push_back(e);
      if (e != kNoEdge && !seen[e]) {
        edge_revenue_[e] = demand.revenue;
        seen[e] = 1;
      }
    }
  }

  const Instance& instance() const { return *instance_; }
  std::shared_ptr<const Instance> instance_ptr() const { return instance_; }
  const CostConfig& cost_config() const { return costs_; }
  std::span<const std::pair<PortIndex, PortIndex>> feature_edges() const { return edges_; }

  EnvState reset(std::uint64_t seed = 0) const {
    const Instance& in = *instance_;
    EnvState s;
    s.seed = seed;
    for (const auto& v : in.fleet()) s.remaining_vessels.push_back(static_cast<double>(v.count));
    auto eval = evaluate(in, std::span<const Service>(), costs_);
    s.remaining_demand = eval.flow.missed;
    s.profit_history.push_back(eval.breakdown.eta);
    s.breakdown = std::move(eval.breakdown);
    s.flow = std::make_shared<const FlowAssignment>(std::move(eval.flow));
    return s;
  }

  Service validate(const Action& action) const {
    return make_service(*instance_, action.vessel, action.ports);
  }

  StepResult step(const EnvState& state, const Action& action) const {
    if (state.done) throw InputError("step called on a finished episode");
    const Instance& in = *instance_;
    StepResult out;
    EnvState& next = out.state;
    next = state;
    Service service = validate(action);
    next.remaining_vessels[service.vessel_class] -= service.n_vessels;
    next.services.push_back(std::move(service));
    next.t = state.t + 1;

    auto eval = evaluate(in, next.services, costs_);
    next.remaining_demand = eval.flow.missed;
    next.profit_history.push_back(eval.breakdown.eta);
    next.breakdown = std::move(eval.breakdown);
    const double missed = eval.flow.total_missed();
    next.flow = std::make_shared<const FlowAssignment>(std::move(eval.flow));

    const double scale = std::abs(next.profit_history[1]);
    const double delta = next.profit_history[next.t] - next.profit_history[next.t - 1];
    out.reward = scale > 0 ? delta / scale : delta;

    bool exhausted = true;
    for (double r : next.remaining_vessels) exhausted = exhausted && r <= 0;
    next.done = next.t >= in.max_services() || missed == 0 || exhausted;
    out.done = next.done;
    return out;
  }

  StateFeatures featurize(const EnvState& state) const {
    const Instance& in = *instance_;
    const std::size_t P = in.port_count();
    const std::size_t S = static_cast<std::size_t>(in.max_services());
    StateFeatures f;
    f.port_rows = P + 1;
    f.edge_rows = kEdgeServiceRows + S;
    f.edge_count = edges_.size();
    f.vessel_rows = in.fleet().size();

    f.ports.assign(f.port_rows * 2, 0.0);
    const auto demands = in.demands();
    for (std::size_t d = 0; d < demands.size(); ++d) {
      f.ports[demands[d].destination * 2] += state.remaining_demand[d];
      f.ports[demands[d].origin * 2 + 1] += state.remaining_demand[d];
    }

    const std::size_t E = edges_.size();
    f.edges.assign(f.edge_rows * E, 0.0);
    auto at = [&](std::size_t row, std::size_t e) -> double& { return f.edges[row * E + e]; };
    for (std::size_t e = 0; e < E; ++e) {
      const auto [o, d] = edges_[e];
      at(kEdgeOrigin, e) = static_cast<double>(o);
      at(kEdgeDestination, e) = static_cast<double>(d);
      at(kEdgeDistance, e) = in.distance(o, d)->distance;
      at(kEdgeRevenue, e) = edge_revenue_[e];
    }
    for (std::size_t d = 0; d < demands.size(); ++d)
      if (demand_edge_[d] != kNoEdge) at(kEdgeRemainingDemand, demand_edge_[d]) += state.remaining_demand[d];
    const ExpandedGraph* graph = state.flow ? state.flow->graph.get() : nullptr;
    for (std::size_t s = 0; s < state.services.size(); ++s) {
      const Service& service = state.services[s];
      for (std::size_t i = 0; i < service.leg_count(); ++i) {
        const auto [o, d] = service.leg(i);
        const std::size_t e = edge_lookup_[o * P + d];
        if (e == kNoEdge) continue;
        if (s < S) at(kEdgeServiceRows + s, e) = 1.0;
        if (graph && s < graph->service_count())
          at(kEdgeRemainingCapacity, e) += state.flow->residual[graph->sail_edge(s, i)];
      }
    }

    f.vessels.reserve(f.vessel_rows * kVesselFeatureCount);
    for (ClassIndex c = 0; c < in.fleet().size(); ++c) {
      const auto row = in.vessel_class(c).features(state.remaining_vessels[c]);
      f.vessels.insert(f.vessels.end(), row.begin(), row.end());
    }
    return f;
  }

 private:
  static constexpr std::size_t kNoEdge = static_cast<std::size_t>(-1);

  std::shared_ptr<const Instance> instance_;
  CostConfig costs_;
  std::vector<std::pair<PortIndex, PortIndex>> edges_;
  std::vector<std::size_t> edge_lookup_;
  std::vector<double> edge_revenue_;
  std::vector<std::size_t> demand_edge_;
};

}  // namespace lsndp
