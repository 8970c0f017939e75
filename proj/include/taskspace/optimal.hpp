#pragma once

#include "taskspace/distribution.hpp"
#include "taskspace/task_system.hpp"

#include <cstddef>
#include <vector>

namespace taskspace {

/// Newton approximants n(0..kmax) of the least fixed point of f, seeded at 0.
/// n(k)_X equals P(S_op_X <= k), the distribution of the optimal offline
/// completion space.
struct NewtonTrace {
  std::vector<TypedVector> approximants;
  /// complements[k] = 1 - n(k), computed directly (not by subtraction).
  std::vector<TypedVector> complements;
  /// |f(n(k)) - n(k)|_inf
  std::vector<double> residuals;
  /// Row k was obtained by a Kleene step because I - f'(n(k-1)) was singular.
  std::vector<bool> kleene_degraded;
};

/// One Newton update of n. Throws ErrorKind::Singular if I - f'(n) is singular
/// (for critical systems this happens as n approaches 1).
TypedVector newton_step(const TaskSystem& ts, const TypedVector& n);

/// n(0..kmax), falling back to a Kleene step on singular rows.
NewtonTrace newton_trace(const TaskSystem& ts, std::size_t kmax);

/// table[k][X] = P(S_op_X <= k) for k = 0..kmax.
DistributionTable optimal_space_cdf(const TaskSystem& ts, std::size_t kmax);

/// table[k][X] = P(S_op_X >= k) = 1 - n(k-1)_X for k = 1..kmax.
DistributionTable optimal_space_tail(const TaskSystem& ts, std::size_t kmax);

struct SeriesResult {
  double value = 0.0;
  /// Number of tail terms summed.
  std::size_t terms = 0;
  /// Estimated bound on the neglected remainder.
  double error_bound = 0.0;
  bool degraded = false;
};

inline constexpr std::size_t kMaxSeriesTerms = 1000000;

/// E[S_op] = sum_{i>=0} (1 - n(i)_X0), summed until the current term and its
/// extrapolated geometric remainder t*r/(1-r) (r = observed term ratio) are
/// both at most 2^-(bits+1).
SeriesResult optimal_space_expectation(const TaskSystem& ts, int bits);

}  // namespace taskspace
