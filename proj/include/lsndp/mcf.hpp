#pragma once

// Greedy revenue-prioritized multi-commodity flow over the expanded graph.
//
// Demands are processed in descending revenue order. Each demand repeatedly
// takes the cheapest residual path (Dijkstra on handling costs) and ships
// min(remaining, bottleneck) along it until it is satisfied or no path with
// spare capacity remains; the rest is rejected.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsndp/error.hpp"
#include "lsndp/graph.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

inline constexpr double kUnboundedResidual = std::numeric_limits<double>::infinity();

struct Path {
  std::vector<EdgeIndex> edges;  // origin port node to destination port node
  double unit_cost = 0;          // $ per FFE
  Capacity bottleneck = Capacity::unbounded();
};

struct EdgeFlow {
  EdgeIndex edge = 0;
  double amount = 0;

  bool operator==(const EdgeFlow&) const = default;
};

struct FlowAssignment {
  std::shared_ptr<const ExpandedGraph> graph;
  // Per demand (instance order), edge flows sorted by edge index.
  std::vector<std::vector<EdgeFlow>> flows;
  std::vector<double> served;
  std::vector<double> missed;
  // Remaining capacity per edge; kUnboundedResidual for uncapacitated edges.
  std::vector<double> residual;
  // Demand indices in the order they were routed.
  std::vector<std::size_t> order;

  double total_missed() const {
    double total = 0;
    for (double m : missed) total += m;
    return total;
  }
  double total_served() const {
    double total = 0;
    for (double s : served) total += s;
    return total;
  }
};

inline std::vector<double> initial_residual(const ExpandedGraph& g) {
  std::vector<double> residual;
  residual.reserve(g.edges().size());
  for (const auto& e : g.edges())
    residual.push_back(e.capacity.is_unbounded() ? kUnboundedResidual : e.capacity.value());
  return residual;
}

// Dijkstra with reusable scratch space. Only the origin's port node may be
// left and only the destination's port node may be entered, so cargo never
// passes through an intermediate port node.
class PathFinder {
 public:
  std::optional<Path> find(const ExpandedGraph& g, std::span<const double> residual,
                           PortIndex origin, PortIndex destination) {
    if (origin == destination) return std::nullopt;
    const auto source = g.port_node(origin);
    const auto target = g.port_node(destination);
    if (!source || !target) return std::nullopt;

    const std::size_t n = g.nodes().size();
    dist_.assign(n, kInf);
    pred_edge_.assign(n, kNone);
    settled_.assign(n, false);
    using Item = std::pair<double, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist_[*source] = 0;
    queue.push({0.0, *source});
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (settled_[u]) continue;
      settled_[u] = true;
      if (u == *target) break;
      if (g.node(u).is_port() && u != *source) continue;
      for (EdgeIndex ei : g.out_edges(u)) {
        const GraphEdge& e = g.edge(ei);
        if (!(residual[ei] > 0)) continue;
        const NodeIndex v = e.to;
        if (settled_[v]) continue;
        if (g.node(v).is_port() && v != *target) continue;
        const double nd = d + e.weight;
        const bool better = nd < dist_[v] ||
                            (nd == dist_[v] && pred_edge_[v] != kNone && u < g.edge(pred_edge_[v]).from);
        if (better) {
          dist_[v] = nd;
          pred_edge_[v] = ei;
          queue.push({nd, v});
        }
      }
    }
    if (!settled_[*target]) return std::nullopt;

    Path path;
    path.unit_cost = dist_[*target];
    for (NodeIndex v = *target; v != *source;) {
      const EdgeIndex ei = pred_edge_[v];
      path.edges.push_back(ei);
      v = g.edge(ei).from;
    }
    std::reverse(path.edges.begin(), path.edges.end());
    for (EdgeIndex ei : path.edges) {
      if (residual[ei] == kUnboundedResidual) continue;
      if (path.bottleneck.is_unbounded() || residual[ei] < path.bottleneck.value())
        path.bottleneck = Capacity::of(residual[ei]);
    }
    return path;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr EdgeIndex kNone = std::numeric_limits<EdgeIndex>::max();
  std::vector<double> dist_;
  std::vector<EdgeIndex> pred_edge_;
  std::vector<char> settled_;
};

inline std::optional<Path> cheapest_path(const ExpandedGraph& g, std::span<const double> residual,
                                         PortIndex origin, PortIndex destination) {
  PathFinder finder;
  return finder.find(g, residual, origin, destination);
}

// Descending revenue; ties by (origin id, destination id), then file order.
inline std::vector<std::size_t> demand_priority(const Instance& instance) {
  const auto demands = instance.demands();
  std::vector<std::size_t> order(demands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Demand& da = demands[a];
    const Demand& db = demands[b];
    if (da.revenue != db.revenue) return da.revenue > db.revenue;
    const auto& oa = instance.port(da.origin).id;
    const auto& ob = instance.port(db.origin).id;
    if (oa != ob) return oa < ob;
    return instance.port(da.destination).id < instance.port(db.destination).id;
  });
  return order;
}

inline FlowAssignment solve_mcf(const Instance& instance,
                                std::shared_ptr<const ExpandedGraph> graph) {
  const ExpandedGraph& g = *graph;
  const auto demands = instance.demands();
  FlowAssignment result;
  result.graph = std::move(graph);
  result.flows.resize(demands.size());
  result.served.assign(demands.size(), 0.0);
  result.missed.assign(demands.size(), 0.0);
  result.residual = initial_residual(g);
  result.order = demand_priority(instance);

  PathFinder finder;
  std::vector<EdgeFlow> scratch;
  for (std::size_t d : result.order) {
    const Demand& demand = demands[d];
    double remaining = demand.quantity;
    scratch.clear();
    while (remaining > 0) {
      auto path = finder.find(g, result.residual, demand.origin, demand.destination);
      if (!path) break;
      const double amount = path->bottleneck.is_unbounded()
                                ? remaining
                                : std::min(remaining, path->bottleneck.value());
      for (EdgeIndex ei : path->edges) {
        scratch.push_back({ei, amount});
        if (result.residual[ei] != kUnboundedResidual) result.residual[ei] -= amount;
      }
      remaining = amount == remaining ? 0.0 : remaining - amount;
      result.served[d] += amount;
    }
    result.missed[d] = remaining;

    std::sort(scratch.begin(), scratch.end(),
              [](const EdgeFlow& a, const EdgeFlow& b) { return a.edge < b.edge; });
    auto& merged = result.flows[d];
    for (const auto& f : scratch) {
      if (!merged.empty() && merged.back().edge == f.edge)
        merged.back().amount += f.amount;
      else
        merged.push_back(f);
    }
  }
  return result;
}

inline FlowAssignment solve_mcf(const Instance& instance, std::span<const Service> services) {
  return solve_mcf(instance,
                   std::make_shared<const ExpandedGraph>(build_expanded_graph(instance, services)));
}

// Throws InvariantError unless the assignment conserves flow per demand,
// respects capacities and accounts for every FFE as served or missed.
inline void verify_flow(const Instance& instance, const FlowAssignment& flow,
                        double tolerance = 1e-6) {
  const ExpandedGraph& g = *flow.graph;
  const auto demands = instance.demands();
  auto close = [&](double a, double b, double scale) {
    return std::abs(a - b) <= tolerance * std::max(1.0, scale);
  };
  std::vector<double> used(g.edges().size(), 0.0);
  std::vector<double> balance(g.nodes().size());
  for (std::size_t d = 0; d < demands.size(); ++d) {
    const Demand& demand = demands[d];
    if (flow.served[d] < 0 || flow.missed[d] < 0)
      throw InvariantError("negative served or missed amount for demand " + std::to_string(d));
    if (!close(flow.served[d] + flow.missed[d], demand.quantity, demand.quantity))
      throw InvariantError("served + missed != quantity for demand " + std::to_string(d));
    std::fill(balance.begin(), balance.end(), 0.0);
    for (const auto& f : flow.flows[d]) {
      if (f.amount < 0) throw InvariantError("negative edge flow");
      used[f.edge] += f.amount;
      balance[g.edge(f.edge).from] -= f.amount;
      balance[g.edge(f.edge).to] += f.amount;
    }
    const auto source = g.port_node(demand.origin);
    const auto target = g.port_node(demand.destination);
    for (NodeIndex v = 0; v < balance.size(); ++v) {
      double expected = 0;
      if (source && v == *source) expected = -flow.served[d];
      if (target && v == *target) expected = flow.served[d];
      if (!close(balance[v], expected, demand.quantity))
        throw InvariantError("flow conservation violated for demand " + std::to_string(d) +
                             " at node " + std::to_string(v));
    }
  }
  for (EdgeIndex e = 0; e < g.edges().size(); ++e) {
    const Capacity cap = g.edge(e).capacity;
    if (cap.is_unbounded()) continue;
    if (used[e] > cap.value() * (1 + tolerance) + tolerance)
      throw InvariantError("capacity exceeded on edge " + std::to_string(e));
    if (!close(flow.residual[e], cap.value() - used[e], cap.value()))
      throw InvariantError("residual inconsistent with flows on edge " + std::to_string(e));
  }
}

}  // namespace lsndp
