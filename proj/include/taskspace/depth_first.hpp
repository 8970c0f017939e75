#pragma once

#include "taskspace/distribution.hpp"
#include "taskspace/optimal.hpp"
#include "taskspace/task_system.hpp"

#include <cstddef>
#include <vector>

namespace taskspace {

/// For each two-child rule, which child runs first (the other waits in the
/// pool). Default: the first-written child runs first.
class LambdaOrder {
 public:
  LambdaOrder() = default;
  explicit LambdaOrder(const TaskSystem& ts) : swapped_(ts.rule_count(), false) {}

  /// Swap the execution order of rule `rule_index`; throws if it is not a
  /// two-child rule.
  void swap(const TaskSystem& ts, std::size_t rule_index);

  bool swapped(std::size_t rule_index) const {
    return rule_index < swapped_.size() && swapped_[rule_index];
  }
  TypeId first(const Rule& r, std::size_t rule_index) const { return r.rhs[swapped(rule_index) ? 1 : 0]; }
  TypeId second(const Rule& r, std::size_t rule_index) const { return r.rhs[swapped(rule_index) ? 0 : 1]; }

 private:
  std::vector<bool> swapped_;
};

/// Matrices of the depth-first recurrence under a fixed lambda:
///   L(X,Y)        = sum of p over X -> Y
///   Q(u,.)(X,Z)   = sum over X -> <Y,Z> of p*u_Y   (Y the first-executed child)
///   Q(.,v)(X,Y)   = sum over X -> <Y,Z> of p*v_Z
struct DfMatrices {
  TypedMatrix linear;
  TypedMatrix first_one;   // Q(1,.)
  TypedMatrix second_one;  // Q(.,1)
};

DfMatrices df_matrices(const TaskSystem& ts, const LambdaOrder& lambda);

/// s[k]_X = P(S_X >= k) under the depth-first scheduler, k = 1..kmax:
///   s[1] = 1,  s[k+1] = (I - L - Q(1 - s[k], .))^-1 Q(., 1) s[k].
DistributionTable df_tail_table(const TaskSystem& ts, const LambdaOrder& lambda, std::size_t kmax);

struct DfDecay {
  double rho = 0.0;
  TypedMatrix b;
};

/// B = (I - L - Q(1,.))^-1 Q(.,1); P(S >= k) is Theta(rho(B)^k).
DfDecay df_decay_rate(const TaskSystem& ts, const LambdaOrder& lambda);

/// sum_{i=1..k} s[i]_X0, stopped once |(I-B)^-1|_inf * |s[k]|_inf <= 2^-bits
/// (or once that bound stalls below double resolution).
SeriesResult df_expectation(const TaskSystem& ts, const LambdaOrder& lambda, int bits);

}  // namespace taskspace
