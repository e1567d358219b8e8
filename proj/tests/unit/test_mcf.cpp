#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "unit/support.hpp"

using namespace lsndp;
using namespace lsndp::testing;

namespace {

// Ports O, H, D with move cost 50 everywhere and transshipment 30 at the hub.
Instance hub_instance(std::vector<Demand> demands, double capacity = 800) {
  std::vector<PortSpec> ports{make_port("OOOOO", 50, 30), make_port("HHHHH", 50, 30), make_port("DDDDD", 50, 30)};
  return Instance("hub", ports, {make_class("V", capacity, 3)}, dense_distances(3, [](auto, auto) { return 100; }),
                  std::move(demands));
}

double variable_profit(const Instance& in, std::span<const Service> services) {
  const auto flow = solve_mcf(in, services);
  const auto terms = variable_terms(in, flow);
  return terms.revenue - terms.reject_penalty - terms.handle();
}

}  // namespace

TEST(CheapestPath, DirectServiceCostsLoadPlusUnload) {
  const Instance in = hub_instance({});
  std::vector<Service> s{make_service(in, 0, {0, 2})};
  const auto g = build_expanded_graph(in, s);
  const auto residual = initial_residual(g);
  const auto path = cheapest_path(g, residual, 0, 2);
  ASSERT_TRUE(path);
  EXPECT_DOUBLE_EQ(path->unit_cost, 100);
  ASSERT_FALSE(path->bottleneck.is_unbounded());
  EXPECT_DOUBLE_EQ(path->bottleneck.value(), 800);
  for (EdgeIndex e : path->edges) EXPECT_NE(g.edge(e).kind, EdgeKind::kTransship);
}

TEST(CheapestPath, ViaHubAddsTransshipment) {
  const Instance in = hub_instance({});
  std::vector<Service> s{make_service(in, 0, {0, 1}), make_service(in, 0, {1, 2})};
  const auto g = build_expanded_graph(in, s);
  const auto path = cheapest_path(g, initial_residual(g), 0, 2);
  ASSERT_TRUE(path);
  EXPECT_DOUBLE_EQ(path->unit_cost, 130);
}

TEST(CheapestPath, UnreachableDestination) {
  const Instance in = hub_instance({});
  std::vector<Service> s{make_service(in, 0, {0, 1})};
  const auto g = build_expanded_graph(in, s);
  EXPECT_FALSE(cheapest_path(g, initial_residual(g), 0, 2));
}

TEST(CheapestPath, SaturatedLegIsSkipped) {
  const Instance in = hub_instance({});
  std::vector<Service> s{make_service(in, 0, {0, 2})};
  const auto g = build_expanded_graph(in, s);
  auto residual = initial_residual(g);
  residual[g.sail_edge(0, 0)] = 0;
  EXPECT_FALSE(cheapest_path(g, residual, 0, 2));
}

TEST(SolveMcf, NoServicesMissesEverything) {
  const Instance in = hub_instance({make_demand(0, 2, 1000, 40), make_demand(2, 1, 900, 7)});
  const auto flow = solve_mcf(in, std::span<const Service>());
  EXPECT_DOUBLE_EQ(flow.missed[0], 40);
  EXPECT_DOUBLE_EQ(flow.missed[1], 7);
  EXPECT_TRUE(flow.flows[0].empty());
  EXPECT_TRUE(flow.flows[1].empty());
}

TEST(SolveMcf, SingleLegArithmetic) {
  const Instance in = hub_instance({make_demand(0, 2, 1000, 500)});
  std::vector<Service> s{make_service(in, 0, {0, 2})};
  const auto flow = solve_mcf(in, s);
  EXPECT_DOUBLE_EQ(flow.served[0], 500);
  EXPECT_DOUBLE_EQ(flow.missed[0], 0);
  EXPECT_DOUBLE_EQ(flow.residual[flow.graph->sail_edge(0, 0)], 300);
  verify_flow(in, flow);
}

TEST(SolveMcf, RevenuePriority) {
  const Instance in = hub_instance({make_demand(0, 2, 1000, 100), make_demand(0, 2, 2000, 100)}, 100);
  std::vector<Service> s{make_service(in, 0, {0, 2})};
  const auto flow = solve_mcf(in, s);
  EXPECT_DOUBLE_EQ(flow.served[1], 100);
  EXPECT_DOUBLE_EQ(flow.missed[0], 100);
  EXPECT_EQ(flow.order, (std::vector<std::size_t>{1, 0}));
  // The exhaustive oracle agrees the higher-revenue demand should take the leg.
  EXPECT_DOUBLE_EQ(variable_profit(in, s), oracle::optimal_variable_profit(in, s));
}

TEST(SolveMcf, TieBreakByPortIds) {
  // Equal revenue: origin id decides, then destination id.
  const Instance in = hub_instance({make_demand(2, 0, 500, 1), make_demand(1, 2, 500, 1), make_demand(1, 0, 500, 1)});
  // DDDDD->OOOOO, then HHHHH->DDDDD, then HHHHH->OOOOO.
  EXPECT_EQ(demand_priority(in), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(SolveMcf, SplitsAcrossPathsWhenBottlenecked) {
  const Instance in = hub_instance({make_demand(0, 2, 1000, 150)}, 100);
  std::vector<Service> s{make_service(in, 0, {0, 2}), make_service(in, 0, {0, 1}), make_service(in, 0, {1, 2})};
  const auto flow = solve_mcf(in, s);
  EXPECT_DOUBLE_EQ(flow.served[0], 150);
  const auto terms = variable_terms(in, flow);
  EXPECT_DOUBLE_EQ(terms.load_unload, 150 * 100);
  EXPECT_DOUBLE_EQ(terms.transshipment, 50 * 30);
  verify_flow(in, flow);
}

TEST(SolveMcf, Deterministic) {
  std::mt19937_64 rng(3);
  RandomInstanceSpec spec;
  spec.max_ports = 7;
  spec.max_services = 4;
  spec.max_demands = 8;
  spec.integral = false;
  spec.max_quantity = 50;
  spec.max_capacity = 60;
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng, spec);
    const auto a = solve_mcf(c.instance, c.services);
    const auto b = solve_mcf(c.instance, c.services);
    ASSERT_EQ(a.served, b.served);
    ASSERT_EQ(a.missed, b.missed);
    ASSERT_EQ(a.residual, b.residual);
    ASSERT_EQ(a.flows.size(), b.flows.size());
    for (std::size_t d = 0; d < a.flows.size(); ++d) {
      ASSERT_EQ(a.flows[d].size(), b.flows[d].size());
      for (std::size_t k = 0; k < a.flows[d].size(); ++k) {
        ASSERT_EQ(a.flows[d][k].edge, b.flows[d][k].edge);
        ASSERT_EQ(a.flows[d][k].amount, b.flows[d][k].amount);
      }
    }
  }
}

TEST(SolveMcf, FeasibleOnRandomInstances) {
  std::mt19937_64 rng(17);
  RandomInstanceSpec spec;
  spec.max_ports = 7;
  spec.max_services = 4;
  spec.max_demands = 8;
  spec.integral = false;
  spec.max_quantity = 50;
  spec.max_capacity = 60;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = random_case(rng, spec);
    const auto flow = solve_mcf(c.instance, c.services);
    ASSERT_NO_THROW(verify_flow(c.instance, flow)) << "trial " << trial;
    for (std::size_t e = 0; e < flow.residual.size(); ++e) ASSERT_GE(flow.residual[e], 0);
  }
}

TEST(SolveMcf, ResidualsNeverIncreaseAsDemandsAreAdded) {
  // Solving with demands 0..k processed in priority order: residuals are monotone in k.
  std::mt19937_64 rng(23);
  RandomInstanceSpec spec;
  spec.max_ports = 6;
  spec.max_services = 3;
  spec.max_demands = 6;
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng, spec);
    const auto order = demand_priority(c.instance);
    std::vector<double> previous;
    for (std::size_t k = 0; k <= order.size(); ++k) {
      std::vector<Demand> prefix;
      for (std::size_t i = 0; i < k; ++i) prefix.push_back(c.instance.demands()[order[i]]);
      const auto flow = solve_mcf(c.instance.with_demands(prefix, "prefix"), c.services);
      for (std::size_t e = 0; e < previous.size(); ++e) ASSERT_LE(flow.residual[e], previous[e]);
      previous = flow.residual;
    }
  }
}

TEST(SolveMcf, GreedyBoundedByExhaustiveOptimum) {
  std::mt19937_64 rng(29);
  RandomInstanceSpec spec;  // <= 4 ports, <= 3 demands, <= 2 services, integers <= 5/6
  int single = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = random_case(rng, spec);
    const double greedy = variable_profit(c.instance, c.services);
    const double best = oracle::optimal_variable_profit(c.instance, c.services);
    ASSERT_LE(greedy, best + 1e-6) << "trial " << trial;
    if (c.instance.demands().size() == 1) {
      ++single;
      ASSERT_NEAR(greedy, best, 1e-6) << "trial " << trial;
    }
  }
  EXPECT_GT(single, 20);
}

TEST(Oracle, RouteEnumerationMatchesHandCount) {
  const Instance in = hub_instance({});
  std::vector<Service> s{make_service(in, 0, {0, 2}), make_service(in, 0, {0, 1}), make_service(in, 0, {1, 2})};
  const auto routes = oracle::enumerate_routes(in, s, 0, 2);
  // Direct (100) and via hub (130).
  ASSERT_EQ(routes.size(), 2u);
  std::vector<double> costs{routes[0].unit_cost, routes[1].unit_cost};
  std::sort(costs.begin(), costs.end());
  EXPECT_DOUBLE_EQ(costs[0], 100);
  EXPECT_DOUBLE_EQ(costs[1], 130);
}
