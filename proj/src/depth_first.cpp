#include "taskspace/depth_first.hpp"

#include "taskspace/error.hpp"
#include "taskspace/linalg.hpp"
#include "taskspace/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace taskspace {

void LambdaOrder::swap(const TaskSystem& ts, std::size_t rule_index) {
  if (rule_index >= ts.rule_count() || !ts.rule(rule_index).binary())
    throw std::invalid_argument("rule " + std::to_string(rule_index) + " is not a two-child rule");
  if (swapped_.size() != ts.rule_count()) swapped_.assign(ts.rule_count(), false);
  swapped_[rule_index] = !swapped_[rule_index];
}

DfMatrices df_matrices(const TaskSystem& ts, const LambdaOrder& lambda) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  DfMatrices m{TypedMatrix::Zero(n, n), TypedMatrix::Zero(n, n), TypedMatrix::Zero(n, n)};
  const auto rules = ts.rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (r.arity() == 1) {
      m.linear(r.lhs, r.rhs[0]) += r.prob;
    } else if (r.binary()) {
      m.first_one(r.lhs, lambda.second(r, i)) += r.prob;
      m.second_one(r.lhs, lambda.first(r, i)) += r.prob;
    }
  }
  return m;
}

namespace {

// Q(u,.) for the first-executed child weights u.
TypedMatrix first_weighted(const TaskSystem& ts, const LambdaOrder& lambda, const TypedVector& u) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  TypedMatrix q = TypedMatrix::Zero(n, n);
  const auto rules = ts.rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (r.binary()) q(r.lhs, lambda.second(r, i)) += r.prob * u(lambda.first(r, i));
  }
  return q;
}

[[noreturn]] void misclassified() {
  throw Error(ErrorKind::Critical,
              "depth-first recurrence matrix is singular; the system is not subcritical (criticality misclassification)");
}

}  // namespace

DistributionTable df_tail_table(const TaskSystem& ts, const LambdaOrder& lambda, std::size_t kmax) {
  const DfMatrices m = df_matrices(ts, lambda);
  const auto n = static_cast<Eigen::Index>(ts.size());
  const TypedMatrix id = TypedMatrix::Identity(n, n);

  DistributionTable t;
  t.kind = DistributionTable::Kind::Tail;
  t.first_k = 1;
  if (kmax == 0) return t;
  TypedVector s = TypedVector::Ones(n);
  t.values.push_back(s);
  t.degraded.push_back(false);
  for (std::size_t k = 1; k < kmax; ++k) {
    const TypedMatrix a = m.linear + first_weighted(ts, lambda, TypedVector(TypedVector::Ones(n) - s));
    auto next = solve(TypedMatrix(id - a), TypedVector(m.second_one * s));
    if (!next) misclassified();
    s = next->cwiseMax(0.0).cwiseMin(s);
    t.values.push_back(s);
    t.degraded.push_back(false);
  }
  return t;
}

DfDecay df_decay_rate(const TaskSystem& ts, const LambdaOrder& lambda) {
  const DfMatrices m = df_matrices(ts, lambda);
  const auto n = static_cast<Eigen::Index>(ts.size());
  auto b = solve(TypedMatrix(TypedMatrix::Identity(n, n) - m.linear - m.first_one), m.second_one);
  if (!b) misclassified();
  DfDecay d;
  d.b = b->cwiseMax(0.0);
  d.rho = spectral_radius(d.b, 1e-13);
  return d;
}

SeriesResult df_expectation(const TaskSystem& ts, const LambdaOrder& lambda, int bits) {
  const DfMatrices m = df_matrices(ts, lambda);
  const auto n = static_cast<Eigen::Index>(ts.size());
  const TypedMatrix id = TypedMatrix::Identity(n, n);
  const DfDecay decay = df_decay_rate(ts, lambda);
  auto b_star = inverse(TypedMatrix(id - decay.b));
  if (!b_star) misclassified();
  const double b_star_norm = inf_norm(*b_star);
  const double target = std::ldexp(1.0, -bits);
  const auto x0 = static_cast<Eigen::Index>(ts.init());

  SeriesResult res;
  TypedVector s = TypedVector::Ones(n);
  double best_bound = INFINITY;
  std::size_t stalled = 0;
  for (std::size_t k = 1; k <= kMaxSeriesTerms; ++k) {
    res.value += s(x0);
    res.terms = k;
    const double bound = b_star_norm * inf_norm(s);
    res.error_bound = bound;
    if (bound <= target) return res;
    // Below double resolution the bound cannot shrink further relative to
    // the sum; stop and report what was achieved.
    if (bound < 1e-15 * std::max(1.0, res.value)) {
      if (bound >= best_bound && ++stalled > 8) {
        res.degraded = true;
        return res;
      }
    }
    best_bound = std::min(best_bound, bound);
    const TypedMatrix a = m.linear + first_weighted(ts, lambda, TypedVector(TypedVector::Ones(n) - s));
    auto next = solve(TypedMatrix(id - a), TypedVector(m.second_one * s));
    if (!next) misclassified();
    s = next->cwiseMax(0.0).cwiseMin(s);
    if (s.isZero(0.0)) {
      res.error_bound = 0.0;
      return res;
    }
  }
  throw Error(ErrorKind::IterationCap, "depth-first expectation: series did not reach the requested precision");
}

}  // namespace taskspace
