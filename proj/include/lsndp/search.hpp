#pragma once

// Policy-free baseline: repeated randomized episodes that pick the largest
// available vessel class, sample a port subset, order it with a small TSP
// heuristic and step the environment. Best network over all rollouts wins.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "lsndp/costs.hpp"
#include "lsndp/env.hpp"
#include "lsndp/error.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

struct SearchConfig {
  int restarts = 1;
  int rollouts_per_restart = 1;
  double port_inclusion_prior = 0.3;
  std::uint64_t rng_seed = 0;
  int max_services = kDefaultMaxServices;
  // Report the most profitable prefix of each episode instead of its final state.
  bool keep_best_prefix = true;
  int threads = 1;

  void validate() const {
    if (restarts < 1 || rollouts_per_restart < 1) throw InputError("restarts and rollouts must be >= 1");
    if (!(port_inclusion_prior > 0 && port_inclusion_prior < 1))
      throw InputError("port inclusion prior must lie in (0, 1)");
    if (max_services < 1) throw InputError("max_services must be >= 1");
    if (threads < 1) throw InputError("threads must be >= 1");
  }
};

// Largest-capacity class with vessels left; ties go to the lower index.
inline std::optional<ClassIndex> select_vessel(const EnvState& state, const Instance& instance) {
  std::optional<ClassIndex> best;
  for (ClassIndex c = 0; c < instance.fleet().size(); ++c) {
    if (!(state.remaining_vessels[c] > 0)) continue;
    if (!best || instance.vessel_class(c).capacity > instance.vessel_class(*best).capacity) best = c;
  }
  return best;
}

namespace search_detail {

inline double tour_length(std::span<const PortIndex> tour, const Instance& instance) {
  double total = 0;
  for (std::size_t i = 0; i < tour.size(); ++i)
    total += instance.distance(tour[i], tour[(i + 1) % tour.size()])->distance;
  return total;
}

// First-improvement 2-opt on a directed tour; segment reversal flips leg
// directions, so moves are scored by recomputing the tour.
inline void two_opt(std::vector<PortIndex>& tour, const Instance& instance) {
  const std::size_t n = tour.size();
  if (n < 4) return;
  double best = tour_length(tour, instance);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < n && !improved; ++i) {
      for (std::size_t j = i + 1; j < n && !improved; ++j) {
        std::reverse(tour.begin() + static_cast<std::ptrdiff_t>(i),
                     tour.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        const double length = tour_length(tour, instance);
        if (length < best - 1e-9) {
          best = length;
          improved = true;
        } else {
          std::reverse(tour.begin() + static_cast<std::ptrdiff_t>(i),
                       tour.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        }
      }
    }
  }
}

inline std::vector<PortIndex> nearest_neighbor(std::span<const PortIndex> ports, std::size_t start,
                                               const Instance& instance) {
  std::vector<PortIndex> tour{ports[start]};
  std::vector<char> used(ports.size(), 0);
  used[start] = 1;
  for (std::size_t k = 1; k < ports.size(); ++k) {
    std::size_t next = ports.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ports.size(); ++j) {
      if (used[j]) continue;
      const double d = instance.distance(tour.back(), ports[j])->distance;
      if (d < best) {
        best = d;
        next = j;
      }
    }
    used[next] = 1;
    tour.push_back(ports[next]);
  }
  return tour;
}

}  // namespace search_detail

// Nearest-neighbour starts plus the input order, each polished by 2-opt. The
// result never sails further than the input order and starts at its first port.
inline std::vector<PortIndex> order_ports(std::vector<PortIndex> ports, const Instance& instance) {
  if (ports.size() < 2) throw InputError("ordering needs at least 2 ports");
  for (PortIndex a : ports)
    for (PortIndex b : ports)
      if (a != b && !instance.distance(a, b))
        throw InputError("missing distance " + instance.port(a).id + "->" + instance.port(b).id);
  if (ports.size() <= 3) {
    if (ports.size() == 3) {
      std::vector<PortIndex> flipped{ports[0], ports[2], ports[1]};
      if (search_detail::tour_length(flipped, instance) < search_detail::tour_length(ports, instance))
        return flipped;
    }
    return ports;
  }

  std::vector<PortIndex> best = ports;
  search_detail::two_opt(best, instance);
  double best_length = search_detail::tour_length(best, instance);
  const std::size_t starts = ports.size() <= 16 ? ports.size() : 8;
  for (std::size_t s = 0; s < starts; ++s) {
    auto tour = search_detail::nearest_neighbor(ports, s, instance);
    search_detail::two_opt(tour, instance);
    const double length = search_detail::tour_length(tour, instance);
    if (length < best_length - 1e-9) {
      best = std::move(tour);
      best_length = length;
    }
  }
  std::rotate(best.begin(), std::find(best.begin(), best.end(), ports.front()), best.end());
  return best;
}

// Per-port inclusion probability: half the uniform prior, half a demand-mass
// weighted probability that equals the prior for a port with average mass.
inline std::vector<double> inclusion_probabilities(const EnvState& state, const Instance& instance,
                                                   double prior) {
  const std::size_t P = instance.port_count();
  std::vector<double> mass(P, 0.0);
  const auto demands = instance.demands();
  double total = 0;
  for (std::size_t d = 0; d < demands.size(); ++d) {
    mass[demands[d].origin] += state.remaining_demand[d];
    mass[demands[d].destination] += state.remaining_demand[d];
    total += 2 * state.remaining_demand[d];
  }
  std::vector<double> probs(P, prior);
  if (total <= 0) return probs;
  for (std::size_t p = 0; p < P; ++p) {
    const double relative = mass[p] / total * static_cast<double>(P);
    const double weighted = 1.0 - std::pow(1.0 - prior, relative);
    probs[p] = 0.5 * prior + 0.5 * weighted;
  }
  return probs;
}

template <typename Rng>
std::vector<PortIndex> sample_ports(std::span<const double> probs, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<PortIndex> subset;
    for (PortIndex p = 0; p < probs.size(); ++p)
      if (unit(rng) < probs[p]) subset.push_back(p);
    if (subset.size() >= 2) return subset;
  }
  std::vector<PortIndex> order(probs.size());
  for (PortIndex p = 0; p < order.size(); ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(),
                   [&](PortIndex a, PortIndex b) { return probs[a] > probs[b]; });
  order.resize(2);
  std::sort(order.begin(), order.end());
  return order;
}

struct RolloutResult {
  std::vector<Service> schedule;
  ProfitBreakdown breakdown;
  std::vector<double> profit_history;
  double policy_seconds = 0;       // vessel choice, sampling, port ordering
  double environment_seconds = 0;  // reset and step, including flow solves
};

template <typename Rng>
RolloutResult rollout(const Environment& env, const SearchConfig& config, Rng& rng) {
  const Instance& instance = env.instance();
  if (instance.port_count() < 2) throw InputError("instance has fewer than 2 ports");
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };
  auto mark = Clock::now();
  EnvState state = env.reset(config.rng_seed);
  RolloutResult best{state.services, state.breakdown, {}};
  best.environment_seconds += seconds_since(mark);
  double best_eta = state.breakdown.eta;
  while (!state.done) {
    mark = Clock::now();
    const auto vessel = select_vessel(state, instance);
    if (!vessel) break;
    const auto probs = inclusion_probabilities(state, instance, config.port_inclusion_prior);
    auto rotation = order_ports(sample_ports(std::span<const double>(probs), rng), instance);
    best.policy_seconds += seconds_since(mark);
    mark = Clock::now();
    state = env.step(state, Action{*vessel, std::move(rotation)}).state;
    best.environment_seconds += seconds_since(mark);
    if (config.keep_best_prefix && state.breakdown.eta > best_eta) {
      best_eta = state.breakdown.eta;
      best.schedule = state.services;
      best.breakdown = state.breakdown;
    }
  }
  if (!config.keep_best_prefix) {
    best.schedule = std::move(state.services);
    best.breakdown = std::move(state.breakdown);
  }
  best.profit_history = state.profit_history;
  return best;
}

inline RolloutResult rollout(const Instance& instance, const SearchConfig& config) {
  Environment env(std::make_shared<const Instance>(instance.with_max_services(config.max_services)));
  std::seed_seq seq{static_cast<std::uint32_t>(config.rng_seed),
                    static_cast<std::uint32_t>(config.rng_seed >> 32), 0u};
  std::mt19937_64 rng(seq);
  return rollout(env, config, rng);
}

struct SolveResult {
  std::vector<Service> schedule;
  ProfitBreakdown breakdown;
  std::size_t best_restart = 0;
  std::size_t best_rollout = 0;
  double policy_seconds = 0;
  double environment_seconds = 0;
  // Best-so-far profit after each rollout, per restart.
  std::vector<std::vector<double>> best_so_far;
};

inline std::mt19937_64 restart_rng(std::uint64_t seed, std::size_t restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

inline SolveResult solve(const Instance& instance, const SearchConfig& config,
                         const CostConfig& costs = {}) {
  config.validate();
  const Environment env(
      std::make_shared<const Instance>(instance.with_max_services(config.max_services)), costs);
  const auto restarts = static_cast<std::size_t>(config.restarts);

  struct RestartBest {
    RolloutResult result;
    std::size_t rollout = 0;
    std::vector<double> trace;
    double policy_seconds = 0;
    double environment_seconds = 0;
  };
  std::vector<RestartBest> per_restart(restarts);
  auto run_restart = [&](std::size_t r) {
    auto rng = restart_rng(config.rng_seed, r);
    RestartBest& slot = per_restart[r];
    for (int k = 0; k < config.rollouts_per_restart; ++k) {
      RolloutResult result = rollout(env, config, rng);
      slot.policy_seconds += result.policy_seconds;
      slot.environment_seconds += result.environment_seconds;
      if (k == 0 || result.breakdown.eta > slot.result.breakdown.eta) {
        slot.result = std::move(result);
        slot.rollout = static_cast<std::size_t>(k);
      }
      slot.trace.push_back(slot.result.breakdown.eta);
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), restarts);
  if (workers <= 1) {
    for (std::size_t r = 0; r < restarts; ++r) run_restart(r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < restarts; r += workers) run_restart(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  SolveResult out;
  for (std::size_t r = 0; r < restarts; ++r) {
    if (r == 0 || per_restart[r].result.breakdown.eta > out.breakdown.eta) {
      out.schedule = per_restart[r].result.schedule;
      out.breakdown = per_restart[r].result.breakdown;
      out.best_restart = r;
      out.best_rollout = per_restart[r].rollout;
    }
    out.policy_seconds += per_restart[r].policy_seconds;
    out.environment_seconds += per_restart[r].environment_seconds;
    out.best_so_far.push_back(std::move(per_restart[r].trace));
  }
  return out;
}

}  // namespace lsndp
