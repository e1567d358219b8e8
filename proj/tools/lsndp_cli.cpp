// lsndp: command-line front end for the liner shipping network design toolkit.
//
// Exit codes: 0 success, 2 input error, 3 internal invariant violation.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsndp/lsndp.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct InstanceFlags {
  std::string data_dir = "./LINERLIB";
  std::string instance;
  int max_services = lsndp::kDefaultMaxServices;
  double bunker_price = 600.0;

  void add_to(CLI::App* app) {
    app->add_option("--data-dir", data_dir, "LINERLIB data directory")->capture_default_str();
    app->add_option("--instance", instance, "Instance name, e.g. Baltic")->required();
    app->add_option("--max-services", max_services, "Maximum number of services")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--bunker-price", bunker_price, "$ per ton for fuel given in tons")
        ->capture_default_str();
  }

  lsndp::Instance load() const {
    lsndp::ParseOptions options;
    options.max_services = max_services;
    options.bunker_price = bunker_price;
    return lsndp::parse_instance(data_dir, instance, options);
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lsndp::InputError("cannot write " + path);
  out << text;
  if (!out) throw lsndp::InputError("I/O failure writing " + path);
}

// Simple rotations pass through; multi-loop rotations are split into simple ones.
std::vector<lsndp::Service> services_from_file(const std::string& path, const lsndp::Instance& instance) {
  std::vector<lsndp::Service> services;
  for (const auto& raw : lsndp::read_rotations(path)) {
    const auto vessel = lsndp::resolve_class(instance, raw.vessel_class);
    const auto ports = lsndp::resolve_ports(instance, raw.ports);
    for (auto& cycle : lsndp::decompose_to_simple(ports))
      services.push_back(lsndp::make_service(instance, vessel, std::move(cycle)));
  }
  return services;
}

void check_report(const lsndp::RunReport& report) {
  const auto& b = report.breakdown;
  if (std::abs(b.signed_sum() - b.eta) > 1e-6 * std::max(1.0, std::abs(b.eta)))
    throw lsndp::InvariantError("profit breakdown does not add up");
  if (report.total_cents() != lsndp::to_cents(b.eta))
    throw lsndp::InvariantError("rounded report rows drift from the exact profit");
}

void emit(const lsndp::RunReport& report, const std::string& report_path) {
  check_report(report);
  std::cout << report.to_table();
  if (!report_path.empty()) write_text(report_path, report.to_key_values());
}

std::vector<std::string> class_names(const lsndp::Instance& instance) {
  std::vector<std::string> names;
  for (const auto& v : instance.fleet()) names.push_back(v.name);
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liner shipping network design toolkit"};
  app.require_subcommand(1);

  std::string voyage_mode = "per_rotation_week";
  auto add_cost_flag = [&](CLI::App* sub) {
    sub->add_option("--voyage-cost-mode", voyage_mode, "per_rotation_week or literal")
        ->check(CLI::IsMember({"per_rotation_week", "literal"}))
        ->capture_default_str();
  };

  // validate
  InstanceFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "Parse and validate an instance");
  validate->alias("parse");
  validate_flags.add_to(validate);

  // evaluate
  InstanceFlags eval_flags;
  std::string eval_schedule;
  std::string eval_report;
  std::string eval_dot;
  auto* evaluate = app.add_subcommand("evaluate", "Profit breakdown of a schedule");
  eval_flags.add_to(evaluate);
  evaluate->add_option("--schedule", eval_schedule, "Schedule JSON file")->required();
  evaluate->add_option("--report", eval_report, "Write key=value report here");
  evaluate->add_option("--dot", eval_dot, "Write the expanded graph in DOT format");
  add_cost_flag(evaluate);

  // solve
  InstanceFlags solve_flags;
  lsndp::SearchConfig search;
  std::string solve_out;
  std::string solve_report;
  bool full_episodes = false;
  auto* solve = app.add_subcommand("solve", "Best-of-N randomized rollout search");
  solve_flags.add_to(solve);
  solve->add_option("--restarts", search.restarts)->capture_default_str()->check(CLI::PositiveNumber);
  solve->add_option("--rollouts", search.rollouts_per_restart, "Rollouts per restart")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve->add_option("--seed", search.rng_seed)->capture_default_str();
  solve->add_option("--prior", search.port_inclusion_prior, "Port inclusion probability")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  solve->add_option("--threads", search.threads, "Worker threads for restarts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve->add_flag("--full-episodes", full_episodes, "Score whole episodes instead of their best prefix");
  solve->add_option("--out", solve_out, "Write the best schedule here");
  solve->add_option("--report", solve_report, "Write key=value report here");
  add_cost_flag(solve);

  // perturb
  InstanceFlags perturb_flags;
  lsndp::PerturbSpec perturb_spec;
  std::string perturb_out = ".";
  auto* perturb = app.add_subcommand("perturb", "Write demand-perturbed instances");
  perturb_flags.add_to(perturb);
  perturb->add_option("--level", perturb_spec.level, "Relative standard deviation")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  perturb->add_option("--count", perturb_spec.count)->capture_default_str()->check(CLI::PositiveNumber);
  perturb->add_option("--seed", perturb_spec.seed)->capture_default_str();
  perturb->add_option("--out-dir", perturb_out)->capture_default_str();

  // serve
  std::string serve_dir = "./LINERLIB";
  int serve_port = -1;
  std::size_t serve_max_connections = 0;
  double serve_bunker = 600.0;
  auto* serve = app.add_subcommand("serve", "Environment protocol server (stdio or TCP)");
  serve->add_option("--data-dir", serve_dir)->capture_default_str();
  serve->add_option("--port", serve_port, "TCP port on 127.0.0.1; stdio when omitted")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--max-connections", serve_max_connections, "Exit after this many connections");
  serve->add_option("--bunker-price", serve_bunker)->capture_default_str();
  add_cost_flag(serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    lsndp::CostConfig costs;
    costs.voyage_cost_mode = lsndp::parse_voyage_cost_mode(voyage_mode);

    if (*validate) {
      const auto instance = validate_flags.load();
      std::cout << "instance " << instance.name() << ": " << instance.port_count() << " ports, "
                << instance.fleet().size() << " vessel classes, " << instance.demands().size()
                << " demands, " << instance.total_demand() << " FFE/week\n";
      for (const auto& v : instance.fleet())
        std::cout << "  " << v.name << " x" << v.count << " (capacity " << v.capacity << ")\n";
      return 0;
    }

    if (*evaluate) {
      const auto instance = eval_flags.load();
      const auto services = services_from_file(eval_schedule, instance);
      const auto start = Clock::now();
      auto result = lsndp::evaluate(instance, services, costs);
      const double elapsed = seconds_since(start);
      lsndp::verify_flow(instance, result.flow);
      if (!eval_dot.empty()) write_text(eval_dot, lsndp::to_dot(*result.flow.graph, instance));
      lsndp::RunReport report;
      report.instance = instance.name();
      report.command = "evaluate";
      report.config = {{"voyage_cost_mode", voyage_mode}, {"services", std::to_string(services.size())}};
      report.breakdown = std::move(result.breakdown);
      report.class_names = class_names(instance);
      report.environment_seconds = elapsed;
      report.schedule_path = eval_schedule;
      emit(report, eval_report);
      return 0;
    }

    if (*solve) {
      const auto instance = solve_flags.load();
      search.max_services = solve_flags.max_services;
      search.keep_best_prefix = !full_episodes;
      const auto result = lsndp::solve(instance, search, costs);
      if (!solve_out.empty()) lsndp::write_schedule(result.schedule, instance, solve_out);
      lsndp::RunReport report;
      report.instance = instance.name();
      report.command = "solve";
      report.config = {{"restarts", std::to_string(search.restarts)},
                       {"rollouts", std::to_string(search.rollouts_per_restart)},
                       {"seed", std::to_string(search.rng_seed)},
                       {"prior", lsndp::format_number(search.port_inclusion_prior)},
                       {"max_services", std::to_string(search.max_services)},
                       {"keep_best_prefix", search.keep_best_prefix ? "true" : "false"},
                       {"voyage_cost_mode", voyage_mode},
                       {"services", std::to_string(result.schedule.size())}};
      report.breakdown = result.breakdown;
      report.class_names = class_names(instance);
      report.inference_seconds = result.policy_seconds;
      report.environment_seconds = result.environment_seconds;
      report.schedule_path = solve_out;
      emit(report, solve_report);
      return 0;
    }

    if (*perturb) {
      const auto instance = perturb_flags.load();
      std::filesystem::create_directories(perturb_out);
      for (const auto& out : lsndp::perturb_demands(instance, perturb_spec)) {
        const auto path = std::filesystem::path(perturb_out) / ("Demand_" + out.name() + ".csv");
        lsndp::write_demands(out, path);
        std::cout << path.string() << "\n";
      }
      return 0;
    }

    if (*serve) {
      lsndp::ParseOptions options;
      options.bunker_price = serve_bunker;
      auto instances = lsndp::InstanceCache::from_directory(serve_dir, options);
      if (serve_port < 0) {
        lsndp::ProtocolSession session(instances, costs);
        lsndp::serve_stream(std::cin, std::cout, session);
      } else {
        lsndp::serve_tcp(static_cast<std::uint16_t>(serve_port), instances, costs, serve_max_connections,
                         [](std::uint16_t port) { std::cerr << "listening on 127.0.0.1:" << port << std::endl; });
      }
      return 0;
    }
  } catch (const lsndp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const lsndp::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
