#pragma once

#include "taskspace/error.hpp"
#include "taskspace/spectral.hpp"
#include "taskspace/task_system.hpp"
#include "taskspace/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testsys {

using taskspace::Rule;
using taskspace::TaskSystem;

/// X -> X X : p, X -> : 1-p
inline TaskSystem sys_a(double p) { return TaskSystem({"X"}, {{0, {0, 0}, p}, {0, {}, 1.0 - p}}, 0); }

inline TaskSystem sys_c(double a2 = 0.1, double a1 = 0.2, double b2 = 0.2, double b1 = 0.3) {
  return TaskSystem({"X", "Y"},
                    {{0, {0, 1}, a2}, {0, {1}, a1}, {0, {}, 1.0 - a2 - a1},
                     {1, {0, 1}, b2}, {1, {1}, b1}, {1, {}, 1.0 - b2 - b1}},
                    0);
}

inline TaskSystem intro() {
  return TaskSystem({"X", "Y"},
                    {{0, {0, 0}, 0.2}, {0, {0, 1}, 0.3}, {0, {}, 0.5}, {1, {0}, 0.7}, {1, {1}, 0.3}}, 0);
}

inline TaskSystem sys_d() {
  return TaskSystem({"X", "Z"}, {{0, {0, 0}, 0.3}, {0, {1}, 0.2}, {0, {}, 0.5}, {1, {}, 1.0}}, 0);
}

inline TaskSystem leaf() { return TaskSystem({"X"}, {{0, {}, 1.0}}, 0); }

/// Closed form of P(S >= k) for any online scheduler on sys_a(p), p < 1/2.
inline double one_type_tail(double p, int k) {
  const double r = (1.0 - p) / p;
  return (r - 1.0) / (std::pow(r, k) - 1.0);
}

/// Random system with up to `max_types` types and 1..3 rules per type.
inline TaskSystem random_system(std::mt19937_64& rng, std::size_t max_types = 5) {
  std::uniform_int_distribution<std::size_t> type_count(1, max_types);
  std::uniform_int_distribution<int> rule_count(1, 3), arity(0, 2);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  const std::size_t n = type_count(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("T" + std::to_string(i));
  std::vector<Rule> rules;
  for (std::size_t t = 0; t < n; ++t) {
    const int m = rule_count(rng);
    std::vector<double> w(m);
    double total = 0.0;
    for (auto& x : w) total += (x = weight(rng));
    for (int j = 0; j < m; ++j) {
      Rule r{t, {}, w[j] / total};
      const int a = arity(rng);
      for (int c = 0; c < a; ++c) r.rhs.push_back(pick(rng));
      rules.push_back(r);
    }
  }
  return TaskSystem(names, rules, 0);
}

/// Rejection-samples a compact subcritical system, all of whose types are
/// reachable from the initial type, with spectral radius at most `max_rho`.
inline TaskSystem random_subcritical_compact(std::mt19937_64& rng, std::size_t max_types = 5,
                                             double max_rho = 0.9) {
  for (;;) {
    const TaskSystem ts = random_system(rng, max_types);
    if (!taskspace::is_compact(ts)) continue;
    const auto reach = taskspace::reachable_from(ts, ts.init());
    if (std::find(reach.begin(), reach.end(), false) != reach.end()) continue;
    try {
      const auto c = taskspace::classify(ts);
      if (c.kind == taskspace::Criticality::Subcritical && c.spectral_radius_estimate <= max_rho) return ts;
    } catch (const taskspace::Error&) {
    }
  }
}

/// Binomial z-test under the null value p0: |p_hat - p0| <= 3 sqrt(p0 (1-p0) / n).
inline bool within_3se(double p_hat, double p0, double n) {
  const double se = std::sqrt(std::max(p0 * (1.0 - p0), 0.0) / n);
  return std::abs(p_hat - p0) <= 3.0 * se + 1e-12;
}

}  // namespace testsys
