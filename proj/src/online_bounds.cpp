#include "taskspace/online_bounds.hpp"

#include "taskspace/error.hpp"
#include "taskspace/linalg.hpp"
#include "taskspace/pgf.hpp"
#include "taskspace/spectral.hpp"
#include "taskspace/validate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace taskspace {

namespace {

void require_compact(const TaskSystem& ts) {
  if (!is_compact(ts)) throw Error(ErrorKind::NotCompact, "task system is not compact; compact it first");
}

}  // namespace

bool BoundCertificate::valid(double tol) const {
  return (v.array() > 1.0).all() && (w.array() > 1.0).all() && residual_v.minCoeff() >= -tol &&
         residual_w.minCoeff() >= -tol;
}

TypedVector compute_v(const TaskSystem& ts) {
  require_compact(ts);
  const TypedVector u = expected_completion_times(ts);
  const double q_max = quadratic_part(ts, u, u).maxCoeff();
  if (!(q_max > 0.0)) throw Error(ErrorKind::NotCompact, "no two-child rules: quadratic part vanishes");
  const double s = 1.0 / q_max;
  return TypedVector::Ones(u.size()) + s * u;
}

TypedVector compute_w(const TaskSystem& ts, double margin) {
  require_compact(ts);
  if (!(margin > 1.0)) throw std::invalid_argument("compute_w: margin must exceed 1");
  const auto n = static_cast<Eigen::Index>(ts.size());
  TypedVector y = TypedVector::Zero(n);
  for (TypeId t = 0; t < ts.size(); ++t)
    if (ts.has_binary_rule(t)) y(static_cast<Eigen::Index>(t)) = 1.0;
  const TypedMatrix a = TypedMatrix::Identity(n, n) - jacobian(ts, ones(ts));
  auto x = solve(a, y);
  if (!x || x->minCoeff() <= 0.0) throw Error(ErrorKind::Critical, "compute_w: I - f'(1) is singular (critical system)");
  const double x_min = x->minCoeff();
  const double c = smallest_coefficient(ts);
  const double r = margin / (c * x_min * std::min(1.0, x_min));
  return TypedVector::Ones(n) + r * *x;
}

std::optional<TypedVector> refine_fixed_point(const TaskSystem& ts, const TypedVector& v) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  const TypedMatrix id = TypedMatrix::Identity(n, n);
  for (double seed : std::array{2.0, 1.5, 4.0}) {
    TypedVector x = seed * v;
    bool converged = false;
    for (int it = 0; it < 200 && x.allFinite(); ++it) {
      const TypedVector fx = pgf_eval(ts, x);
      auto dx = solve(id - jacobian(ts, x), TypedVector(fx - x));
      if (!dx) break;
      x += *dx;
      if (inf_norm(*dx) <= 1e-14 * std::max(1.0, inf_norm(x))) {
        converged = true;
        break;
      }
    }
    if (!converged || !x.allFinite()) continue;
    if (x.minCoeff() <= 1.0 + 1e-6) continue;
    const TypedVector res = x - pgf_eval(ts, x);
    if (res.minCoeff() < -kCertificateTol || res.maxCoeff() > kCertificateTol) continue;
    return x;
  }
  return std::nullopt;
}

BoundCertificate make_certificate(const TaskSystem& ts, TypedVector v, TypedVector w) {
  BoundCertificate cert;
  cert.residual_v = v - pgf_eval(ts, v);
  cert.residual_w = pgf_eval(ts, w) - w;
  cert.v_min = v.minCoeff();
  cert.w_max = w.maxCoeff();
  cert.v = std::move(v);
  cert.w = std::move(w);
  return cert;
}

BoundCertificate make_certificate(const TaskSystem& ts, double margin, bool refine) {
  TypedVector v = compute_v(ts);
  TypedVector w = compute_w(ts, margin);
  if (refine) {
    if (auto fixed = refine_fixed_point(ts, v)) {
      auto cert = make_certificate(ts, *fixed, *fixed);
      cert.refined = true;
      return cert;
    }
  }
  return make_certificate(ts, std::move(v), std::move(w));
}

TailBounds online_tail_bounds(const BoundCertificate& cert, TypeId x0, std::size_t k) {
  if (k == 0) return {1.0, 1.0};
  const auto i = static_cast<Eigen::Index>(x0);
  const double kk = static_cast<double>(k);
  const double upper = (cert.v(i) - 1.0) / (std::pow(cert.v_min, kk) - 1.0);
  const double lower = (cert.w(i) - 1.0) / (std::pow(cert.w_max, kk + 2.0) - 1.0);
  return {std::clamp(lower, 0.0, 1.0), std::clamp(upper, 0.0, 1.0)};
}

}  // namespace taskspace
