#pragma once

// Run reports: a human table shaped like the classic profit breakdown, plus a
// flat key=value file for machines. The printed total is the signed sum of the
// printed rows and equals the profit rounded to cents.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lsndp/costs.hpp"
#include "lsndp/error.hpp"
#include "lsndp/types.hpp"

namespace lsndp {

inline std::int64_t to_cents(double dollars) { return std::llround(dollars * 100.0); }

inline std::string format_cents(std::int64_t cents) {
  const bool negative = cents < 0;
  const std::uint64_t magnitude = negative ? static_cast<std::uint64_t>(-(cents + 1)) + 1
                                           : static_cast<std::uint64_t>(cents);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%llu.%02llu", negative ? "-" : "",
                static_cast<unsigned long long>(magnitude / 100),
                static_cast<unsigned long long>(magnitude % 100));
  return buf;
}

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

struct ReportRow {
  std::string key;
  std::string label;
  std::int64_t cents = 0;
  int sign = 1;  // contribution to the total
};

struct RunReport {
  std::string instance;
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  ProfitBreakdown breakdown;
  std::vector<std::string> class_names;
  double inference_seconds = 0;
  double environment_seconds = 0;
  std::string schedule_path;

  // Rows are rounded so that their signed sum is exactly the profit rounded to
  // cents (largest remainder); each row stays within one cent of its exact value.
  std::vector<ReportRow> money_rows() const {
    const auto& b = breakdown;
    std::vector<ReportRow> rows{
        {"revenue", "Revenue", 0, +1},
        {"unused_vessel_profit", "Unused vessel profit", 0, +1},
        {"vessel_service_cost", "Vessel service cost", 0, -1},
        {"voyage_cost", "Voyage cost and fee", 0, -1},
        {"handling_cost", "Handling and transshipment cost", 0, -1},
        {"rejected_demand_penalty", "Rejected demand penalty", 0, -1},
    };
    const double exact[] = {b.revenue, -b.unused_vessel, b.service_cost, b.voyage(), b.handle(), b.reject_penalty};
    std::vector<double> signed_cents(rows.size());
    std::vector<std::int64_t> floors(rows.size());
    std::int64_t floor_sum = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      signed_cents[i] = rows[i].sign * exact[i] * 100.0;
      floors[i] = static_cast<std::int64_t>(std::floor(signed_cents[i]));
      floor_sum += floors[i];
    }
    const std::int64_t extra = to_cents(b.eta) - floor_sum;
    if (extra < 0 || extra > static_cast<std::int64_t>(rows.size())) {
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i].cents = to_cents(exact[i]);
      return rows;
    }
    std::vector<std::size_t> by_remainder(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) by_remainder[i] = i;
    std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t x, std::size_t y) {
      return signed_cents[x] - static_cast<double>(floors[x]) > signed_cents[y] - static_cast<double>(floors[y]);
    });
    for (std::int64_t k = 0; k < extra; ++k) ++floors[by_remainder[static_cast<std::size_t>(k)]];
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].cents = rows[i].sign * floors[i];
    return rows;
  }

  std::int64_t total_cents() const {
    std::int64_t total = 0;
    for (const auto& row : money_rows()) total += row.sign * row.cents;
    return total;
  }

  std::string vessels_used_text() const { return format_fixed(breakdown.vessels_used_total(), 2); }

  std::string to_table() const {
    std::ostringstream out;
    char line[160];
    auto emit = [&](const std::string& label, const std::string& value) {
      std::snprintf(line, sizeof line, "%-34s %18s\n", label.c_str(), value.c_str());
      out << line;
    };
    out << "instance: " << instance << "    command: " << command << "\n";
    const auto rows = money_rows();
    emit(rows[0].label, format_cents(rows[0].cents));
    emit(rows[1].label, format_cents(rows[1].cents));
    emit("Vessel used", vessels_used_text());
    for (std::size_t i = 2; i < rows.size(); ++i) emit(rows[i].label, format_cents(rows[i].cents));
    emit("Total net profit", format_cents(total_cents()));
    for (std::size_t c = 0; c < breakdown.vessels_used.size() && c < class_names.size(); ++c)
      emit("  vessels " + class_names[c], format_fixed(breakdown.vessels_used[c], 2));
    emit("Inference time (s)", format_fixed(inference_seconds, 3));
    emit("Environment time (s)", format_fixed(environment_seconds, 3));
    return out.str();
  }

  std::string to_key_values() const {
    std::ostringstream out;
    const auto& b = breakdown;
    out << "instance=" << instance << "\n";
    out << "command=" << command << "\n";
    for (const auto& [k, v] : config) out << "config." << k << "=" << v << "\n";
    for (const auto& row : money_rows()) out << row.key << "=" << format_cents(row.cents) << "\n";
    out << "vessels_used=" << vessels_used_text() << "\n";
    out << "total_net_profit=" << format_cents(total_cents()) << "\n";
    out << "eta_exact=" << format_fixed(b.eta, 6) << "\n";
    out << "handling_load_unload=" << format_cents(to_cents(b.handling_load_unload)) << "\n";
    out << "handling_transshipment=" << format_cents(to_cents(b.handling_transshipment)) << "\n";
    out << "voyage_port_call=" << format_cents(to_cents(b.voyage_port_call)) << "\n";
    out << "voyage_fuel=" << format_cents(to_cents(b.voyage_fuel)) << "\n";
    out << "voyage_canal=" << format_cents(to_cents(b.voyage_canal)) << "\n";
    for (std::size_t c = 0; c < b.vessels_used.size() && c < class_names.size(); ++c)
      out << "vessels_used." << class_names[c] << "=" << format_fixed(b.vessels_used[c], 4) << "\n";
    out << "timing.inference_seconds=" << format_fixed(inference_seconds, 6) << "\n";
    out << "timing.environment_seconds=" << format_fixed(environment_seconds, 6) << "\n";
    if (!schedule_path.empty()) out << "schedule=" << schedule_path << "\n";
    return out.str();
  }
};

inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

// Cents parsed back from a report value such as "-12596.07".
inline std::int64_t parse_cents(const std::string& text) {
  return std::llround(std::stod(text) * 100.0);
}

}  // namespace lsndp
