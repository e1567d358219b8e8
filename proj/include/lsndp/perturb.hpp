#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lsndp/error.hpp"
#include "lsndp/linerlib_io.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

struct PerturbSpec {
  double level = 0.1;  // relative standard deviation
  int count = 1;
  std::uint64_t seed = 0;
};

inline std::string perturbed_name(const std::string& base, double level, int k) {
  return base + "_p" + format_number(level) + "_" + std::to_string(k);
}

// Instance k draws every quantity from Normal(d_q, level * d_q), clamped at 0.
// Each k has its own RNG stream, so it can be regenerated on its own.
inline Instance perturb_one(const Instance& instance, double level, std::uint64_t seed, int k) {
  if (level < 0) throw InputError("perturbation level must be >= 0");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Demand> demands(instance.demands().begin(), instance.demands().end());
  if (level > 0) {
    for (auto& d : demands) d.quantity = std::max(0.0, d.quantity + level * d.quantity * normal(rng));
  }
  return instance.with_demands(std::move(demands), perturbed_name(instance.name(), level, k));
}

inline std::vector<Instance> perturb_demands(const Instance& instance, const PerturbSpec& spec) {
  if (spec.level < 0) throw InputError("perturbation level must be >= 0");
  if (spec.count < 1) throw InputError("perturbation count must be >= 1");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int k = 0; k < spec.count; ++k) out.push_back(perturb_one(instance, spec.level, spec.seed, k));
  return out;
}

}  // namespace lsndp
