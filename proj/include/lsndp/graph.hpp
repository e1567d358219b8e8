#pragma once

// Expanded proxy-node graph. Each (port, service) call becomes a proxy node;
// cargo enters and leaves the network through port nodes, changes service
// through transshipment edges between proxies of the same port, and travels on
// zero-cost sail edges whose capacity is the service's vessel capacity.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lsndp/error.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

// Edge capacity with an explicit unbounded state, so min() over a path is exact.
class Capacity {
 public:
  static constexpr Capacity unbounded() { return Capacity(true, 0.0); }
  static constexpr Capacity of(double value) { return Capacity(false, value); }

  constexpr bool is_unbounded() const { return unbounded_; }
  constexpr double value() const { return value_; }

  constexpr bool operator==(const Capacity&) const = default;

 private:
  constexpr Capacity(bool unbounded, double value) : unbounded_(unbounded), value_(value) {}
  bool unbounded_;
  double value_;
};

enum class EdgeKind { kSail = 0, kLoad = 1, kUnload = 2, kTransship = 3 };

inline const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kSail: return "sail";
    case EdgeKind::kLoad: return "load";
    case EdgeKind::kUnload: return "unload";
    case EdgeKind::kTransship: return "transship";
  }
  return "?";
}

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;
inline constexpr std::size_t kNoService = std::numeric_limits<std::size_t>::max();

struct GraphNode {
  PortIndex port = 0;
  std::size_t service = kNoService;  // kNoService for port nodes
  std::size_t position = 0;          // rotation position for proxies

  bool is_port() const { return service == kNoService; }
};

struct GraphEdge {
  NodeIndex from = 0;
  NodeIndex to = 0;
  EdgeKind kind = EdgeKind::kSail;
  double weight = 0;  // $ per FFE
  Capacity capacity = Capacity::unbounded();
  std::size_t service = kNoService;  // owning service (the source proxy's, for transship)
  std::size_t position = 0;
};

class ExpandedGraph {
 public:
  std::span<const GraphNode> nodes() const { return nodes_; }
  std::span<const GraphEdge> edges() const { return edges_; }
  const GraphNode& node(NodeIndex i) const { return nodes_[i]; }
  const GraphEdge& edge(EdgeIndex i) const { return edges_[i]; }

  std::optional<NodeIndex> port_node(PortIndex port) const {
    if (port >= port_node_.size() || port_node_[port] == kAbsent) return std::nullopt;
    return port_node_[port];
  }
  NodeIndex proxy_node(std::size_t service, std::size_t position) const {
    return proxy_offset_[service] + position;
  }
  // Sail edge leaving rotation position `position` of `service`.
  EdgeIndex sail_edge(std::size_t service, std::size_t position) const {
    return sail_offset_[service] + position;
  }
  std::span<const EdgeIndex> out_edges(NodeIndex node) const {
    return std::span<const EdgeIndex>(adjacency_).subspan(
        adjacency_offset_[node], adjacency_offset_[node + 1] - adjacency_offset_[node]);
  }

  std::size_t service_count() const { return proxy_offset_.size(); }
  std::size_t proxy_count() const { return nodes_.size() - port_nodes_; }
  std::size_t count(EdgeKind kind) const {
    std::size_t n = 0;
    for (const auto& e : edges_) n += e.kind == kind;
    return n;
  }

 private:
  static constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

  friend ExpandedGraph build_expanded_graph(const Instance&, std::span<const Service>);

  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::size_t> port_node_;
  std::size_t port_nodes_ = 0;
  std::vector<std::size_t> proxy_offset_;
  std::vector<std::size_t> sail_offset_;
  std::vector<std::size_t> adjacency_offset_;
  std::vector<EdgeIndex> adjacency_;
};

// Edge order: sail, load, unload, transship; within a kind by service index then
// rotation position. Adjacency lists preserve that order.
inline ExpandedGraph build_expanded_graph(const Instance& instance,
                                          std::span<const Service> services) {
  ExpandedGraph g;
  const std::size_t P = instance.port_count();
  g.port_node_.assign(P, ExpandedGraph::kAbsent);

  std::vector<std::vector<NodeIndex>> proxies_at(P);
  for (const auto& s : services) {
    for (std::size_t i = 0; i < s.rotation.size(); ++i) {
      const auto [from, to] = s.leg(i);
      if (from >= P || to >= P) throw InputError("service references an unknown port");
      if (!instance.distance(from, to))
        throw InputError("service leg " + instance.port(from).id + "->" + instance.port(to).id +
                         " has no distance entry");
    }
    for (PortIndex p : s.rotation) g.port_node_[p] = 0;
  }
  for (PortIndex p = 0; p < P; ++p) {
    if (g.port_node_[p] == ExpandedGraph::kAbsent) continue;
    g.port_node_[p] = g.nodes_.size();
    g.nodes_.push_back({p, kNoService, 0});
  }
  g.port_nodes_ = g.nodes_.size();
  for (std::size_t s = 0; s < services.size(); ++s) {
    g.proxy_offset_.push_back(g.nodes_.size());
    for (std::size_t i = 0; i < services[s].rotation.size(); ++i) {
      const PortIndex p = services[s].rotation[i];
      proxies_at[p].push_back(g.nodes_.size());
      g.nodes_.push_back({p, s, i});
    }
  }

  for (std::size_t s = 0; s < services.size(); ++s) {
    g.sail_offset_.push_back(g.edges_.size());
    const double cap = instance.vessel_class(services[s].vessel_class).capacity;
    const std::size_t n = services[s].rotation.size();
    for (std::size_t i = 0; i < n; ++i) {
      g.edges_.push_back({g.proxy_node(s, i), g.proxy_node(s, (i + 1) % n), EdgeKind::kSail, 0.0,
                          Capacity::of(cap), s, i});
    }
  }
  for (EdgeKind kind : {EdgeKind::kLoad, EdgeKind::kUnload}) {
    for (std::size_t s = 0; s < services.size(); ++s) {
      for (std::size_t i = 0; i < services[s].rotation.size(); ++i) {
        const PortIndex p = services[s].rotation[i];
        const NodeIndex port = g.port_node_[p];
        const NodeIndex proxy = g.proxy_node(s, i);
        const double w = instance.port(p).move_cost;
        if (kind == EdgeKind::kLoad)
          g.edges_.push_back({port, proxy, kind, w, Capacity::unbounded(), s, i});
        else
          g.edges_.push_back({proxy, port, kind, w, Capacity::unbounded(), s, i});
      }
    }
  }
  for (std::size_t s = 0; s < services.size(); ++s) {
    for (std::size_t i = 0; i < services[s].rotation.size(); ++i) {
      const PortIndex p = services[s].rotation[i];
      const NodeIndex from = g.proxy_node(s, i);
      for (NodeIndex to : proxies_at[p]) {
        if (to == from) continue;
        g.edges_.push_back({from, to, EdgeKind::kTransship, instance.port(p).transshipment_cost,
                            Capacity::unbounded(), s, i});
      }
    }
  }

  // CSR adjacency, stable in edge order.
  g.adjacency_offset_.assign(g.nodes_.size() + 1, 0);
  for (const auto& e : g.edges_) ++g.adjacency_offset_[e.from + 1];
  for (std::size_t i = 0; i < g.nodes_.size(); ++i)
    g.adjacency_offset_[i + 1] += g.adjacency_offset_[i];
  g.adjacency_.resize(g.edges_.size());
  std::vector<std::size_t> fill(g.adjacency_offset_.begin(), g.adjacency_offset_.end() - 1);
  for (EdgeIndex e = 0; e < g.edges_.size(); ++e) g.adjacency_[fill[g.edges_[e].from]++] = e;
  return g;
}

// Splits a closed walk with repeated ports into simple cycles whose legs,
// together, are exactly the legs of the walk (closing leg included). A cycle is
// emitted every time a port already on the stack is reached again.
template <typename Id>
std::vector<std::vector<Id>> decompose_to_simple(const std::vector<Id>& walk) {
  std::vector<Id> distinct = walk;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw InputError("rotation needs at least 2 distinct ports");

  std::vector<std::vector<Id>> cycles;
  std::vector<Id> stack;
  auto visit = [&](const Id& port) {
    auto it = std::find(stack.begin(), stack.end(), port);
    if (it == stack.end()) {
      stack.push_back(port);
      return;
    }
    std::vector<Id> cycle(it, stack.end());
    if (cycle.size() < 2) throw InputError("rotation contains a leg from a port to itself");
    cycles.push_back(std::move(cycle));
    stack.erase(it + 1, stack.end());
  };
  for (const auto& port : walk) visit(port);
  visit(walk.front());
  return cycles;
}

// Graphviz rendering for debugging.
inline std::string to_dot(const ExpandedGraph& g, const Instance& instance) {
  std::ostringstream out;
  out << "digraph expanded {\n";
  for (NodeIndex i = 0; i < g.nodes().size(); ++i) {
    const auto& n = g.node(i);
    out << "  n" << i << " [label=\"" << instance.port(n.port).id;
    if (n.is_port())
      out << "\", shape=box];\n";
    else
      out << "/s" << n.service << "\"];\n";
  }
  for (const auto& e : g.edges()) {
    out << "  n" << e.from << " -> n" << e.to << " [label=\"" << to_string(e.kind) << " w="
        << e.weight;
    if (!e.capacity.is_unbounded()) out << " cap=" << e.capacity.value();
    out << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace lsndp
