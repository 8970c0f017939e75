#pragma once

#include "taskspace/task_system.hpp"
#include "taskspace/validate.hpp"

#include <optional>
#include <string_view>

namespace taskspace {

/// Spectral radius of a nonnegative square matrix.
///
/// The support graph is split into strongly connected components; on each
/// irreducible block, power iteration runs on the shifted, row-sum-normalized
/// block (primitive, same Perron vector) until the Collatz-Wielandt bracket
///   min_i (Ax)_i / x_i <= rho <= max_i (Ax)_i / x_i
/// is narrower than `tol`. The result is the maximum over blocks.
double spectral_radius(const TypedMatrix& m, double tol = 1e-12);

enum class Criticality { Critical, Subcritical };

std::string_view to_string(Criticality c);

struct Classification {
  Criticality kind = Criticality::Critical;
  double spectral_radius_estimate = 0.0;
  /// E[T_X] per type, present iff Subcritical.
  std::optional<TypedVector> expected_times;
};

/// Subcritical iff rho(f'(1)) < 1 - tol, cross-checked against the linear
/// system u = f'(1) u + 1. Throws ErrorKind::InconsistentCriticality when the
/// two indicators disagree.
Classification classify(const TaskSystem& ts, double tol = kDefaultTol);

/// Solves u = f'(1) u + 1. Throws ErrorKind::Critical when the system has no
/// finite nonnegative solution.
TypedVector expected_completion_times(const TaskSystem& ts);

}  // namespace taskspace
