#pragma once

#include "taskspace/task_system.hpp"

#include <optional>
#include <stdexcept>
#include <utility>

namespace taskspace {

inline constexpr double kCertificateTol = 1e-9;
inline constexpr double kDefaultMargin = 1.5;

/// Vectors v, w > 1 with f(v) <= v and f(w) >= w. Any online scheduler then
/// satisfies
///   (w_X0 - 1) / (w_max^(k+2) - 1) <= P(S >= k) <= (v_X0 - 1) / (v_min^k - 1).
struct BoundCertificate {
  TypedVector v;
  TypedVector w;
  double v_min = 0.0;
  double w_max = 0.0;
  TypedVector residual_v;  // v - f(v)
  TypedVector residual_w;  // f(w) - w
  bool refined = false;

  bool valid(double tol = kCertificateTol) const;
};

/// v = 1 + s*u with u the expected completion times and s = 1 / max_X Q(u,u)_X.
/// Requires a compact subcritical system.
TypedVector compute_v(const TaskSystem& ts);

/// w = 1 + r*x with x = (I - f'(1))^-1 y, y_X = [X has a two-child rule], and
/// r = margin / (c * x_min * min(1, x_min)), c the smallest pgf coefficient.
TypedVector compute_w(const TaskSystem& ts, double margin = kDefaultMargin);

/// Newton on f(x) = x from multiples of v, looking for a fixed point > 1.
/// Returns it when found and it passes the certificate checks.
std::optional<TypedVector> refine_fixed_point(const TaskSystem& ts, const TypedVector& v);

BoundCertificate make_certificate(const TaskSystem& ts, double margin = kDefaultMargin, bool refine = false);

BoundCertificate make_certificate(const TaskSystem& ts, TypedVector v, TypedVector w);

struct TailBounds {
  double lower = 0.0;
  double upper = 1.0;
};

/// Both bounds clamped to [0,1].
TailBounds online_tail_bounds(const BoundCertificate& cert, TypeId x0, std::size_t k);

}  // namespace taskspace
