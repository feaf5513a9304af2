#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace psk {

struct Check {
  std::string name;
  bool passed = true;
  double residual = 0.0;
  double tolerance = 0.0;
  std::optional<std::pair<int, int>> at;
};

struct Metric {
  std::string name;
  double value = 0.0;
  std::optional<std::pair<int, int>> at;
};

// Outcome of a verification sweep. Checks carry pass/fail; metrics are informational.
struct Report {
  std::string kind;
  std::vector<Check> checks;
  std::vector<Metric> metrics;

  void check(std::string name, double residual, double tolerance,
             std::optional<std::pair<int, int>> at = std::nullopt) {
    checks.push_back({std::move(name), residual <= tolerance, residual, tolerance, at});
  }
  void fail(std::string name, std::optional<std::pair<int, int>> at = std::nullopt) {
    checks.push_back({std::move(name), false, 0.0, 0.0, at});
  }
  void metric(std::string name, double value, std::optional<std::pair<int, int>> at = std::nullopt) {
    metrics.push_back({std::move(name), value, at});
  }

  void append(const Report& o, const std::string& prefix = {}) {
    for (auto c : o.checks) {
      c.name = prefix + c.name;
      checks.push_back(std::move(c));
    }
    for (auto m : o.metrics) {
      m.name = prefix + m.name;
      metrics.push_back(std::move(m));
    }
  }

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  std::vector<Check> failures(const std::string& prefix = {}) const {
    std::vector<Check> out;
    for (const auto& c : checks)
      if (!c.passed && c.name.rfind(prefix, 0) == 0) out.push_back(c);
    return out;
  }

  double max_residual(const std::string& prefix = {}) const {
    double r = 0.0;
    for (const auto& c : checks)
      if (c.name.rfind(prefix, 0) == 0) r = std::max(r, c.residual);
    return r;
  }
};

}  // namespace psk
