#include "taskspace/linalg.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace taskspace {

namespace {

struct Factorization {
  Eigen::PartialPivLU<TypedMatrix> lu;
  double rcond = 0.0;
};

std::optional<Factorization> factor(const TypedMatrix& a, double min_rcond) {
  if (!a.allFinite()) return std::nullopt;
  Factorization f{Eigen::PartialPivLU<TypedMatrix>(a), 0.0};
  const auto& u = f.lu.matrixLU();
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    if (u(i, i) == 0.0) return std::nullopt;
  const TypedMatrix inv = f.lu.inverse();
  if (!inv.allFinite()) return std::nullopt;
  f.rcond = 1.0 / (std::max(1.0, inf_norm(a)) * inf_norm(inv));
  if (!(f.rcond >= min_rcond)) return std::nullopt;
  return f;
}

}  // namespace

double scaled_rcond(const TypedMatrix& a) {
  auto f = factor(a, 0.0);
  return f ? f->rcond : 0.0;
}

std::optional<TypedVector> solve(const TypedMatrix& a, const TypedVector& b, double min_rcond) {
  auto f = factor(a, min_rcond);
  if (!f) return std::nullopt;
  TypedVector x = f->lu.solve(b);
  if (!x.allFinite()) return std::nullopt;
  return x;
}

std::optional<TypedMatrix> solve(const TypedMatrix& a, const TypedMatrix& b, double min_rcond) {
  auto f = factor(a, min_rcond);
  if (!f) return std::nullopt;
  TypedMatrix x = f->lu.solve(b);
  if (!x.allFinite()) return std::nullopt;
  return x;
}

std::optional<TypedMatrix> inverse(const TypedMatrix& a, double min_rcond) {
  auto f = factor(a, min_rcond);
  if (!f) return std::nullopt;
  return f->lu.inverse();
}

}  // namespace taskspace
