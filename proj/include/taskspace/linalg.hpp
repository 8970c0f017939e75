#pragma once

#include "taskspace/task_system.hpp"

#include <optional>

namespace taskspace {

// Systems handled here are of the form I - M with M a small nonnegative
// matrix, so conditioning is measured against the unit scale of I:
//   rcond = 1 / (max(1, |A|_inf) * |A^-1|_inf).
inline constexpr double kMinRcond = 1e-13;

double scaled_rcond(const TypedMatrix& a);

/// Solves a x = b by LU with partial pivoting; nullopt if a is singular to
/// working precision.
std::optional<TypedVector> solve(const TypedMatrix& a, const TypedVector& b, double min_rcond = kMinRcond);
std::optional<TypedMatrix> solve(const TypedMatrix& a, const TypedMatrix& b, double min_rcond = kMinRcond);

std::optional<TypedMatrix> inverse(const TypedMatrix& a, double min_rcond = kMinRcond);

inline double inf_norm(const TypedVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
inline double inf_norm(const TypedMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace taskspace
