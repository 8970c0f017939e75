#pragma once

#include "taskspace/task_system.hpp"

#include <cstddef>
#include <vector>

namespace taskspace {

inline constexpr double kDefaultTol = 1e-9;

struct ValidationReport {
  bool prob_sums_ok = true;
  double max_prob_sum_error = 0.0;
  std::vector<TypeId> unreachable_types;
  TypedVector lfp;
  /// |lfp - 1|_inf, kept so borderline systems are visible.
  double lfp_gap = 0.0;
  bool completes_ae = false;
  std::vector<TypeId> compact_types;

  bool ok() const noexcept { return prob_sums_ok && unreachable_types.empty() && completes_ae; }
  bool compact() const noexcept;
  std::size_t type_count = 0;
};

/// Least fixed point of f by Newton's method from 0 (Kleene step where
/// I - f'(n) is singular). Stops once successive iterates differ by at most
/// `tol` in the max norm.
TypedVector least_fixed_point(const TaskSystem& ts, double tol = kDefaultTol, std::size_t max_iter = 100000);

/// reach[t] is true iff `t` is reachable from `from` (reflexive).
std::vector<bool> reachable_from(const TaskSystem& ts, TypeId from);

/// Types from which some two-child rule's lhs is reachable.
std::vector<TypeId> compact_types(const TaskSystem& ts);
bool is_compact(const TaskSystem& ts);

ValidationReport validate(const TaskSystem& ts, double tol = kDefaultTol);

struct Compaction {
  TaskSystem system;
  /// Removed types, as ids of the input system.
  std::vector<TypeId> removed;
};

/// Iteratively drops rules of non-compact types and their occurrences on
/// right-hand sides until every remaining type is compact. Throws
/// InitNotCompactError if the initial type gets removed.
Compaction compact(const TaskSystem& ts);

}  // namespace taskspace
