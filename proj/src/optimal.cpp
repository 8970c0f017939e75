#include "taskspace/optimal.hpp"

#include "taskspace/error.hpp"
#include "taskspace/linalg.hpp"
#include "taskspace/newton.hpp"

#include <algorithm>
#include <cmath>

namespace taskspace {

TypedVector newton_step(const TaskSystem& ts, const TypedVector& n) {
  const NewtonKernel newton(ts);
  const TypedVector e = TypedVector::Ones(n.size()) - n;
  auto next = newton.step(e);
  if (!next) throw Error(ErrorKind::Singular, "Newton step: I - f'(n) is singular");
  return TypedVector::Ones(n.size()) - *next;
}

NewtonTrace newton_trace(const TaskSystem& ts, std::size_t kmax) {
  const NewtonKernel newton(ts);
  NewtonTrace trace;
  TypedVector e = TypedVector::Ones(static_cast<Eigen::Index>(ts.size()));
  auto push = [&](bool degraded) {
    trace.approximants.push_back(TypedVector::Ones(e.size()) - e);
    trace.complements.push_back(e);
    trace.residuals.push_back(newton.residual(e));
    trace.kleene_degraded.push_back(degraded);
  };
  push(false);
  for (std::size_t k = 1; k <= kmax; ++k) {
    auto next = newton.step(e);
    const bool degraded = !next;
    e = degraded ? newton.kleene(e) : std::move(*next);
    push(degraded);
  }
  return trace;
}

DistributionTable optimal_space_cdf(const TaskSystem& ts, std::size_t kmax) {
  auto trace = newton_trace(ts, kmax);
  DistributionTable t;
  t.kind = DistributionTable::Kind::Cdf;
  t.first_k = 0;
  t.values = std::move(trace.approximants);
  t.degraded = std::move(trace.kleene_degraded);
  return t;
}

DistributionTable optimal_space_tail(const TaskSystem& ts, std::size_t kmax) {
  DistributionTable t;
  t.kind = DistributionTable::Kind::Tail;
  t.first_k = 1;
  if (kmax == 0) return t;
  auto trace = newton_trace(ts, kmax - 1);
  t.values = std::move(trace.complements);
  t.degraded = std::move(trace.kleene_degraded);
  return t;
}

SeriesResult optimal_space_expectation(const TaskSystem& ts, int bits) {
  const NewtonKernel newton(ts);
  const double target = std::ldexp(1.0, -(bits + 1));
  const auto x0 = static_cast<Eigen::Index>(ts.init());

  SeriesResult res;
  TypedVector e = TypedVector::Ones(static_cast<Eigen::Index>(ts.size()));
  double prev = 0.0;
  for (std::size_t k = 0; k < kMaxSeriesTerms; ++k) {
    const double term = e(x0);
    res.value += term;
    res.terms = k + 1;
    if (term == 0.0) {
      res.error_bound = 0.0;
      return res;
    }
    if (k > 0) {
      const double r = std::clamp(term / prev, 0.0, 1.0);
      const double tail = r < 1.0 ? term * r / (1.0 - r) : INFINITY;
      if (term <= target && tail <= target) {
        res.error_bound = tail;
        return res;
      }
    }
    prev = term;
    auto next = newton.step(e);
    if (!next) res.degraded = true;
    e = next ? std::move(*next) : newton.kleene(e);
  }
  throw Error(ErrorKind::IterationCap, "optimal expectation: series did not reach the requested precision");
}

}  // namespace taskspace
