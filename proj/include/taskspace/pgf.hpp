#pragma once

#include "taskspace/task_system.hpp"

namespace taskspace {

/// f(x): componentwise probability generating function,
/// f_X(x) = sum over rules X -> alpha of p * prod_{Y in alpha} x_Y.
TypedVector pgf_eval(const TaskSystem& ts, const TypedVector& x);

/// f'(x), entry (X,Y) = d f_X / d x_Y.
TypedMatrix jacobian(const TaskSystem& ts, const TypedVector& x);

/// L: coefficients of the one-child rules, L(X,Y) = sum of p over X -> Y.
TypedMatrix linear_part(const TaskSystem& ts);

/// Q(u,v)_X = sum over two-child rules X -> <Y,Z> of p * u_Y * v_Z (written order).
TypedVector quadratic_part(const TaskSystem& ts, const TypedVector& u, const TypedVector& v);

/// Smallest nonzero coefficient of f (after merging duplicate rules).
double smallest_coefficient(const TaskSystem& ts);

TypedVector ones(const TaskSystem& ts);

}  // namespace taskspace
