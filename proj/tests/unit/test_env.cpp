#include <gtest/gtest.h>

#include <chrono>

#include "unit/support.hpp"

using namespace lsndp;
using namespace lsndp::testing;

namespace {

std::shared_ptr<const Instance> shared_synth(int max_services = kDefaultMaxServices) {
  return std::make_shared<const Instance>(synth12(max_services));
}

// A random simple rotation of 2..5 ports.
Action random_action(const Instance& in, std::mt19937_64& rng) {
  std::vector<PortIndex> ports(in.port_count());
  std::iota(ports.begin(), ports.end(), PortIndex{0});
  std::shuffle(ports.begin(), ports.end(), rng);
  ports.resize(2 + rng() % 4);
  return {static_cast<ClassIndex>(rng() % in.fleet().size()), ports};
}

}  // namespace

TEST(Environment, ResetMatchesEmptyNetwork) {
  Environment env(shared_synth());
  const Instance& in = env.instance();
  const auto s = env.reset(3);
  EXPECT_EQ(s.t, 0);
  EXPECT_TRUE(s.services.empty());
  ASSERT_EQ(s.profit_history.size(), 1u);
  double fleet_value = 0;
  for (const auto& v : in.fleet()) fleet_value += v.count * v.tc_rate * 7;
  EXPECT_DOUBLE_EQ(s.profit_history[0], -1000 * in.total_demand() + fleet_value);
  double remaining = 0;
  for (double r : s.remaining_demand) remaining += r;
  EXPECT_DOUBLE_EQ(remaining, in.total_demand());
  for (ClassIndex c = 0; c < in.fleet().size(); ++c)
    EXPECT_EQ(s.remaining_vessels[c], in.vessel_class(c).count);
  EXPECT_FALSE(s.done);
}

TEST(Environment, StepBookkeeping) {
  Environment env(shared_synth());
  const Instance& in = env.instance();
  const auto s0 = env.reset();
  const Action a{1, resolve_ports(in, {"DEBRV", "PLGDY", "FIKTK"})};
  const auto r = env.step(s0, a);
  EXPECT_EQ(r.state.t, 1);
  ASSERT_EQ(r.state.services.size(), 1u);
  EXPECT_DOUBLE_EQ(r.state.remaining_vessels[1], in.vessel_class(1).count - r.state.services[0].n_vessels);
  ASSERT_EQ(r.state.profit_history.size(), 2u);
  EXPECT_DOUBLE_EQ(r.state.profit_history[1], r.state.breakdown.eta);
  const double eta1 = r.state.profit_history[1];
  EXPECT_DOUBLE_EQ(r.reward, (eta1 - s0.profit_history[0]) / std::abs(eta1));
  // Input state untouched.
  EXPECT_EQ(s0.t, 0);
  EXPECT_TRUE(s0.services.empty());
}

TEST(Environment, InvalidActionsAndStepAfterDone) {
  Environment env(shared_synth(1));
  const auto s0 = env.reset();
  EXPECT_THROW(env.step(s0, Action{7, {0, 1}}), InputError);
  EXPECT_THROW(env.step(s0, Action{0, {0}}), InputError);
  EXPECT_THROW(env.step(s0, Action{0, {0, 1, 0}}), InputError);
  EXPECT_THROW(env.step(s0, Action{0, {0, 99}}), std::exception);
  const auto r = env.step(s0, Action{0, {0, 1}});
  EXPECT_TRUE(r.done);  // max_services = 1
  EXPECT_THROW(env.step(r.state, Action{0, {0, 2}}), InputError);
}

TEST(Environment, DoneWhenAllDemandServed) {
  std::vector<PortSpec> ports{make_port("AAAAA"), make_port("BBBBB")};
  auto in = std::make_shared<const Instance>(Instance("easy", ports, {make_class("V", 100, 5)},
                                                      dense_distances(2, [](auto, auto) { return 100; }),
                                                      {make_demand(0, 1, 1000, 10)}));
  Environment env(in);
  const auto r = env.step(env.reset(), Action{0, {0, 1}});
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.state.remaining_demand[0], 0);
}

TEST(Environment, DoneWhenEveryClassExhausted) {
  std::vector<PortSpec> ports{make_port("AAAAA"), make_port("BBBBB"), make_port("CCCCC")};
  auto in = std::make_shared<const Instance>(Instance("tight", ports, {make_class("V", 1, 1)},
                                                      dense_distances(3, [](auto, auto) { return 2016; }),
                                                      {make_demand(0, 1, 1000, 10)}));
  Environment env(in);
  const auto r = env.step(env.reset(), Action{0, {0, 2}});
  EXPECT_LT(r.state.remaining_vessels[0], 0);
  EXPECT_TRUE(r.done);
}

TEST(Environment, TelescopingAndReplayOnRandomEpisodes) {
  Environment env(shared_synth(8));
  const Instance& in = env.instance();
  std::mt19937_64 rng(99);
  for (int episode = 0; episode < 100; ++episode) {
    std::vector<Action> actions;
    auto s = env.reset(static_cast<std::uint64_t>(episode));
    std::vector<double> rewards;
    while (!s.done) {
      actions.push_back(random_action(in, rng));
      auto r = env.step(s, actions.back());
      rewards.push_back(r.reward);
      s = std::move(r.state);
    }
    const auto& h = s.profit_history;
    const double scale = std::abs(h[1]) > 0 ? std::abs(h[1]) : 1.0;
    double sum = 0;
    for (double r : rewards) sum += r * scale;
    ASSERT_NEAR(sum, h.back() - h.front(), 1e-6 * std::max(1.0, std::abs(h.back() - h.front())));

    auto replay = env.reset(static_cast<std::uint64_t>(episode));
    for (const auto& a : actions) replay = env.step(replay, a).state;
    ASSERT_EQ(replay.profit_history, h);  // bit-identical
  }
}

TEST(Featurize, DimensionsOnReset) {
  Environment env(shared_synth(5));
  const Instance& in = env.instance();
  const auto f = env.featurize(env.reset());
  const std::size_t P = in.port_count();
  EXPECT_EQ(f.port_rows, P + 1);
  EXPECT_EQ(f.ports.size(), (P + 1) * 2);
  EXPECT_EQ(f.edge_rows, 6u + 5u);
  EXPECT_EQ(f.edge_count, P * (P - 1));
  EXPECT_EQ(f.edges.size(), f.edge_rows * f.edge_count);
  EXPECT_EQ(f.vessel_rows, in.fleet().size());
  EXPECT_EQ(f.vessels.size(), in.fleet().size() * kVesselFeatureCount);
  // Global row is zero; service rows and remaining capacity start at zero.
  EXPECT_EQ(f.ports[P * 2], 0);
  EXPECT_EQ(f.ports[P * 2 + 1], 0);
  for (std::size_t e = 0; e < f.edge_count; ++e) {
    EXPECT_EQ(f.edge_at(kEdgeRemainingCapacity, e), 0);
    for (std::size_t s = 0; s < 5; ++s) EXPECT_EQ(f.edge_at(kEdgeServiceRows + s, e), 0);
  }
  // Remaining count is the last vessel column.
  for (ClassIndex c = 0; c < in.fleet().size(); ++c)
    EXPECT_EQ(f.vessels[c * kVesselFeatureCount + kVesselFeatureCount - 1], in.vessel_class(c).count);
}

TEST(Featurize, StaticRowsAndDemandAccounting) {
  Environment env(shared_synth());
  const Instance& in = env.instance();
  std::mt19937_64 rng(8);
  auto s = env.reset();
  for (int k = 0; k < 3 && !s.done; ++k) s = env.step(s, random_action(in, rng)).state;
  const auto f = env.featurize(s);
  double incoming = 0, outgoing = 0, remaining = 0, edge_demand = 0;
  for (std::size_t p = 0; p < in.port_count(); ++p) {
    incoming += f.ports[p * 2];
    outgoing += f.ports[p * 2 + 1];
  }
  for (double r : s.remaining_demand) remaining += r;
  for (std::size_t e = 0; e < f.edge_count; ++e) {
    edge_demand += f.edge_at(kEdgeRemainingDemand, e);
    const auto o = static_cast<PortIndex>(f.edge_at(kEdgeOrigin, e));
    const auto d = static_cast<PortIndex>(f.edge_at(kEdgeDestination, e));
    EXPECT_EQ(f.edge_at(kEdgeDistance, e), in.distance(o, d)->distance);
    double revenue = 0;
    for (const auto& dem : in.demands())
      if (dem.origin == o && dem.destination == d) {
        revenue = dem.revenue;
        break;
      }
    EXPECT_EQ(f.edge_at(kEdgeRevenue, e), revenue);
  }
  EXPECT_NEAR(incoming, remaining, 1e-9);
  EXPECT_NEAR(outgoing, remaining, 1e-9);
  EXPECT_NEAR(edge_demand, remaining, 1e-9);
}

TEST(Featurize, ServiceRowMarksExactlyItsLegs) {
  Environment env(shared_synth());
  const Instance& in = env.instance();
  const auto rotation = resolve_ports(in, {"DEBRV", "SEGOT", "SESTO"});
  const auto s = env.step(env.reset(), Action{0, rotation}).state;
  const auto f = env.featurize(s);
  std::set<std::pair<PortIndex, PortIndex>> legs;
  for (const auto& l : s.services[0].legs()) legs.insert(l);
  double capacity = 0;
  for (std::size_t e = 0; e < f.edge_count; ++e) {
    const std::pair<PortIndex, PortIndex> pair{static_cast<PortIndex>(f.edge_at(kEdgeOrigin, e)),
                                               static_cast<PortIndex>(f.edge_at(kEdgeDestination, e))};
    EXPECT_EQ(f.edge_at(kEdgeServiceRows, e), legs.count(pair) ? 1.0 : 0.0);
    EXPECT_EQ(f.edge_at(kEdgeServiceRows + 1, e), 0.0);
    capacity += f.edge_at(kEdgeRemainingCapacity, e);
    if (!legs.count(pair)) {
      EXPECT_EQ(f.edge_at(kEdgeRemainingCapacity, e), 0.0);
    }
  }
  // Remaining capacity equals the flow solver's residual on the sail edges.
  double residual = 0;
  for (std::size_t i = 0; i < 3; ++i) residual += s.flow->residual[s.flow->graph->sail_edge(0, i)];
  EXPECT_DOUBLE_EQ(capacity, residual);
}

TEST(Featurize, DependsOnlyOnState) {
  Environment env(shared_synth());
  const auto s = env.step(env.reset(), Action{0, {0, 1, 2}}).state;
  const auto a = env.featurize(s);
  env.featurize(env.reset());
  const auto b = env.featurize(s);
  EXPECT_EQ(a.ports, b.ports);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.vessels, b.vessels);
}

TEST(Environment, SyntheticEpisodeIsFast) {
  // Smaller than Baltic-scale acceptance check; same code path.
  Environment env(shared_synth());
  SearchConfig config;
  const auto start = std::chrono::steady_clock::now();
  auto rng = restart_rng(1, 0);
  rollout(env, config, rng);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 1.0);
}
