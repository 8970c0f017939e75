#pragma once

#include "taskspace/task_system.hpp"

#include <cstddef>
#include <vector>

namespace taskspace {

/// Per-k, per-type probabilities of a completion-space random variable.
struct DistributionTable {
  enum class Kind {
    Cdf,   // P(S <= k)
    Tail,  // P(S >= k)
  };

  Kind kind = Kind::Tail;
  std::size_t first_k = 0;
  /// values[i] holds the vector for k = first_k + i.
  std::vector<TypedVector> values;
  /// Rows computed with a fallback (e.g. a Kleene step instead of Newton).
  std::vector<bool> degraded;

  std::size_t last_k() const noexcept { return first_k + values.size() - 1; }
  const TypedVector& row(std::size_t k) const { return values.at(k - first_k); }
  double at(std::size_t k, TypeId t) const { return row(k)(static_cast<Eigen::Index>(t)); }
};

}  // namespace taskspace
