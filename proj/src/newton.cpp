#include "taskspace/newton.hpp"

#include "taskspace/linalg.hpp"
#include "taskspace/pgf.hpp"

namespace taskspace {

NewtonKernel::NewtonKernel(const TaskSystem& ts)
    : ts_(&ts), jac1_(jacobian(ts, ones(ts))) {
  id_minus_jac1_ = TypedMatrix::Identity(jac1_.rows(), jac1_.cols()) - jac1_;
}

std::optional<TypedVector> NewtonKernel::step(const TypedVector& e) const {
  TypedMatrix m = id_minus_jac1_;
  TypedVector q = TypedVector::Zero(e.size());
  for (const auto& r : ts_->rules()) {
    if (!r.binary()) continue;
    const TypeId a = r.rhs[0];
    const TypeId b = r.rhs[1];
    m(r.lhs, a) += r.prob * e(b);
    m(r.lhs, b) += r.prob * e(a);
    q(r.lhs) += r.prob * e(a) * e(b);
  }
  auto next = solve(m, q);
  if (!next) return std::nullopt;
  // Exact arithmetic keeps 0 <= e' <= e; clip rounding noise.
  return next->cwiseMax(0.0).cwiseMin(e);
}

TypedVector NewtonKernel::kleene(const TypedVector& e) const {
  TypedVector out = TypedVector::Zero(e.size());
  for (const auto& r : ts_->rules()) {
    if (r.arity() == 1) {
      out(r.lhs) += r.prob * e(r.rhs[0]);
    } else if (r.arity() == 2) {
      const double ea = e(r.rhs[0]);
      const double eb = e(r.rhs[1]);
      out(r.lhs) += r.prob * (ea + eb - ea * eb);
    }
  }
  return out;
}

double NewtonKernel::residual(const TypedVector& e) const { return inf_norm(TypedVector(e - kleene(e))); }

}  // namespace taskspace
