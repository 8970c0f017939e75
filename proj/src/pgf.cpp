#include "taskspace/pgf.hpp"

#include <algorithm>
#include <limits>

namespace taskspace {

TypedVector pgf_eval(const TaskSystem& ts, const TypedVector& x) {
  TypedVector fx = TypedVector::Zero(static_cast<Eigen::Index>(ts.size()));
  for (const auto& r : ts.rules()) {
    double term = r.prob;
    for (TypeId c : r.rhs) term *= x(c);
    fx(r.lhs) += term;
  }
  return fx;
}

TypedMatrix jacobian(const TaskSystem& ts, const TypedVector& x) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  TypedMatrix j = TypedMatrix::Zero(n, n);
  for (const auto& r : ts.rules()) {
    if (r.arity() == 1) {
      j(r.lhs, r.rhs[0]) += r.prob;
    } else if (r.arity() == 2) {
      j(r.lhs, r.rhs[0]) += r.prob * x(r.rhs[1]);
      j(r.lhs, r.rhs[1]) += r.prob * x(r.rhs[0]);
    }
  }
  return j;
}

TypedMatrix linear_part(const TaskSystem& ts) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  TypedMatrix l = TypedMatrix::Zero(n, n);
  for (const auto& r : ts.rules())
    if (r.arity() == 1) l(r.lhs, r.rhs[0]) += r.prob;
  return l;
}

TypedVector quadratic_part(const TaskSystem& ts, const TypedVector& u, const TypedVector& v) {
  TypedVector q = TypedVector::Zero(static_cast<Eigen::Index>(ts.size()));
  for (const auto& r : ts.rules())
    if (r.binary()) q(r.lhs) += r.prob * u(r.rhs[0]) * v(r.rhs[1]);
  return q;
}

double smallest_coefficient(const TaskSystem& ts) {
  double c = std::numeric_limits<double>::infinity();
  for (const auto& r : ts.rules()) {
    // Square terms p*x_Y^2 and cross terms p*x_Y*x_Z both have coefficient p
    // once duplicate rules are merged.
    c = std::min(c, r.prob);
  }
  return c;
}

TypedVector ones(const TaskSystem& ts) { return TypedVector::Ones(static_cast<Eigen::Index>(ts.size())); }

}  // namespace taskspace
