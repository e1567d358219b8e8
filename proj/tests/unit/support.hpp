#pragma once

// Hand-built instances shared by the unit tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lsndp/lsndp.hpp"

namespace lsndp::testing {

inline std::filesystem::path synthetic_dir() { return LSNDP_TEST_DATA; }
inline std::filesystem::path fixtures_dir() { return LSNDP_FIXTURES; }

inline Instance synth12(int max_services = kDefaultMaxServices) {
  return parse_instance(synthetic_dir(), "Synth12", max_services);
}

inline PortSpec make_port(std::string id, double move = 0, double transship = 0, double fixed = 0,
                          double per_ffe = 0) {
  PortSpec p;
  p.id = std::move(id);
  p.name = p.id;
  p.move_cost = move;
  p.transshipment_cost = transship;
  p.fixed_call_cost = fixed;
  p.variable_call_cost = per_ffe;
  return p;
}

inline VesselClass make_class(std::string name, double capacity, int count, double tc = 1000,
                              double speed = 12, double fuel = 0, double idle = 0) {
  VesselClass v;
  v.name = std::move(name);
  v.capacity = capacity;
  v.count = count;
  v.tc_rate = tc;
  v.design_speed = speed;
  v.min_speed = speed;
  v.max_speed = speed;
  v.fuel_design = fuel;
  v.fuel_idle = idle;
  return v;
}

// Complete distance table: `dist(i, j)` for every ordered pair.
template <typename F>
std::vector<DistanceEntry> dense_distances(std::size_t n, F dist) {
  std::vector<DistanceEntry> out;
  for (PortIndex i = 0; i < n; ++i)
    for (PortIndex j = 0; j < n; ++j)
      if (i != j) out.push_back({i, j, static_cast<double>(dist(i, j)), 0, false, false});
  return out;
}

inline Demand make_demand(PortIndex o, PortIndex d, double revenue, double quantity) {
  Demand x;
  x.origin = o;
  x.destination = d;
  x.revenue = revenue;
  x.quantity = quantity;
  return x;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("lsndp_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command, capturing stdout.
inline CommandResult run_command(const std::string& command) {
  CommandResult r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Random small instance for property tests. Integer data when `integral`.
struct RandomInstanceSpec {
  std::size_t min_ports = 2;
  std::size_t max_ports = 4;
  std::size_t max_demands = 3;
  std::size_t max_services = 2;
  double max_quantity = 5;
  double max_capacity = 6;
  bool integral = true;
};

struct RandomCase {
  Instance instance;
  std::vector<Service> services;
};

inline RandomCase random_case(std::mt19937_64& rng, const RandomInstanceSpec& spec) {
  auto uniform_int = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  auto uniform_real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto value = [&](double lo, double hi) {
    return spec.integral ? static_cast<double>(uniform_int(static_cast<long>(lo), static_cast<long>(hi)))
                         : uniform_real(lo, hi);
  };

  const auto P = static_cast<std::size_t>(uniform_int(static_cast<long>(spec.min_ports), static_cast<long>(spec.max_ports)));
  std::vector<PortSpec> ports;
  for (std::size_t i = 0; i < P; ++i)
    ports.push_back(make_port("P" + std::to_string(i), value(0, 50), value(0, 50), value(0, 100), value(0, 3)));
  std::vector<VesselClass> fleet{make_class("Small", value(1, spec.max_capacity), 2),
                                 make_class("Large", value(1, spec.max_capacity), 1)};
  auto dist = dense_distances(P, [&](PortIndex, PortIndex) { return uniform_int(10, 400); });

  std::vector<Demand> demands;
  const auto D = static_cast<std::size_t>(uniform_int(1, static_cast<long>(spec.max_demands)));
  for (std::size_t k = 0; k < D; ++k) {
    PortIndex o = static_cast<PortIndex>(uniform_int(0, static_cast<long>(P) - 1));
    PortIndex d = static_cast<PortIndex>(uniform_int(0, static_cast<long>(P) - 2));
    if (d >= o) ++d;
    demands.push_back(make_demand(o, d, value(100, 2000), value(1, spec.max_quantity)));
  }
  Instance instance("random", ports, fleet, dist, demands);

  std::vector<Service> services;
  const auto S = static_cast<std::size_t>(uniform_int(0, static_cast<long>(spec.max_services)));
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<PortIndex> all(P);
    for (PortIndex i = 0; i < P; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(uniform_int(2, static_cast<long>(P))));
    services.push_back(make_service(instance, static_cast<ClassIndex>(uniform_int(0, 1)), all));
  }
  return {std::move(instance), std::move(services)};
}

}  // namespace lsndp::testing
