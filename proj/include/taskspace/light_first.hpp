#pragma once

#include "taskspace/task_system.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace taskspace {

/// Light-first weight order: types sorted by v ascending, ties by id.
std::vector<TypeId> weight_order(const TypedVector& v);

/// Types whose pool count is unbounded with positive probability under the
/// v-light-first scheduler. X qualifies iff some Y reachable from the initial
/// type generates the multiset <X, Y> using only rules whose lhs is not
/// heavier than X.
std::vector<TypeId> accumulating_types(const TaskSystem& ts, const TypedVector& v);

struct EllEstimate {
  std::size_t ell = 0;
  std::size_t states = 0;
  /// False when the abstract state space hit its cap; ell is then a partial max.
  bool complete = true;
};

inline constexpr std::size_t kDefaultAccCap = 3;
inline constexpr std::size_t kEllStateCap = 200000;

/// Largest number of non-accumulating tasks seen simultaneously in the pool,
/// by exhaustive search over abstract light-first pool states in which the
/// counts of accumulating types saturate at `acc_cap`. Best effort: the
/// saturation abstraction has no soundness proof.
EllEstimate estimate_ell(const TaskSystem& ts, const TypedVector& v, std::size_t acc_cap = kDefaultAccCap,
                         std::size_t state_cap = kEllStateCap);

struct LightFirstAnalysis {
  std::vector<TypeId> order;
  std::vector<TypeId> accumulating;
  double v_min = 0.0;
  /// min over two-child rules X -> <Y,Z> of max(v_Y, v_Z)
  double v_minmax = 0.0;
  /// min of v over accumulating types
  double v_minacc = 0.0;
  std::optional<std::size_t> ell;
};

LightFirstAnalysis analyze_light_first(const TaskSystem& ts, const TypedVector& v,
                                       std::optional<std::size_t> ell = std::nullopt);

struct LightFirstBounds {
  double basic = 1.0;
  /// Present when ell is known and k >= ell.
  std::optional<double> refined;
};

/// basic   = (v_X0 - 1) / (v_min * v_minmax^(k-1) - 1)
/// refined = (v_X0 - 1) / (v_min^ell * v_minacc^(k-ell) - 1), k >= ell
/// Both clamped to [0,1].
LightFirstBounds light_first_bounds(const TaskSystem& ts, const TypedVector& v, const LightFirstAnalysis& a,
                                    std::size_t k);

}  // namespace taskspace
