#pragma once

#include "taskspace/task_system.hpp"

#include <optional>

namespace taskspace {

/// Newton's method on f(x) - x, iterated on the complement e = 1 - n.
///
/// With f(1) = 1 the Newton update n' = n + (I - f'(n))^-1 (f(n) - n) becomes
///   e' = (I - f'(n))^-1 Q(e,e),   I - f'(n) = I - f'(1) + D(e),
/// where D(e) is the part of f'(1) - f'(1-e) coming from the two-child rules.
/// Tails 1 - n(k) thus keep full relative precision however close n gets to 1.
class NewtonKernel {
 public:
  explicit NewtonKernel(const TaskSystem& ts);

  /// One Newton step; nullopt when I - f'(1 - e) is singular.
  std::optional<TypedVector> step(const TypedVector& e) const;

  /// One Kleene step n <- f(n), expressed on complements: 1 - f(1 - e).
  TypedVector kleene(const TypedVector& e) const;

  /// |f(n) - n|_inf for n = 1 - e.
  double residual(const TypedVector& e) const;

  const TypedMatrix& jacobian_at_one() const noexcept { return jac1_; }

 private:
  const TaskSystem* ts_;
  TypedMatrix jac1_;
  TypedMatrix id_minus_jac1_;
};

}  // namespace taskspace
