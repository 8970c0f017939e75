#include "taskspace/light_first.hpp"

#include "taskspace/error.hpp"
#include "taskspace/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

namespace taskspace {

std::vector<TypeId> weight_order(const TypedVector& v) {
  std::vector<TypeId> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), TypeId{0});
  std::stable_sort(order.begin(), order.end(), [&](TypeId a, TypeId b) {
    return v(static_cast<Eigen::Index>(a)) < v(static_cast<Eigen::Index>(b));
  });
  return order;
}

namespace {

std::vector<std::size_t> ranks_of(const std::vector<TypeId>& order) {
  std::vector<std::size_t> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  return rank;
}

using Closure = std::vector<std::vector<char>>;

// reach[a][b]: b occurs in a multiset generated from a using only rules whose
// lhs has rank <= bound (reflexive).
Closure bounded_reach(const TaskSystem& ts, const std::vector<std::size_t>& rank, std::size_t bound) {
  const std::size_t n = ts.size();
  Closure reach(n, std::vector<char>(n, 0));
  for (TypeId a = 0; a < n; ++a) {
    std::deque<TypeId> work{a};
    reach[a][a] = 1;
    while (!work.empty()) {
      const TypeId t = work.front();
      work.pop_front();
      if (rank[t] > bound) continue;
      for (const auto& r : ts.rules_of(t))
        for (TypeId c : r.rhs)
          if (!reach[a][c]) {
            reach[a][c] = 1;
            work.push_back(c);
          }
    }
  }
  return reach;
}

}  // namespace

std::vector<TypeId> accumulating_types(const TaskSystem& ts, const TypedVector& v) {
  const std::size_t n = ts.size();
  const auto rank = ranks_of(weight_order(v));
  const auto from_init = reachable_from(ts, ts.init());

  std::vector<TypeId> out;
  for (TypeId x = 0; x < n; ++x) {
    const auto reach = bounded_reach(ts, rank, rank[x]);
    bool accumulating = false;
    for (TypeId y = 0; y < n && !accumulating; ++y) {
      if (!from_init[y]) continue;
      for (TypeId w = 0; w < n && !accumulating; ++w) {
        if (!reach[y][w] || rank[w] > rank[x]) continue;
        for (const auto& r : ts.rules_of(w)) {
          if (!r.binary()) continue;
          const TypeId c = r.rhs[0];
          const TypeId d = r.rhs[1];
          if ((reach[c][x] && reach[d][y]) || (reach[c][y] && reach[d][x])) {
            accumulating = true;
            break;
          }
        }
      }
    }
    if (accumulating) out.push_back(x);
  }
  return out;
}

EllEstimate estimate_ell(const TaskSystem& ts, const TypedVector& v, std::size_t acc_cap, std::size_t state_cap) {
  const std::size_t n = ts.size();
  const auto order = weight_order(v);
  std::vector<char> acc(n, 0);
  for (TypeId t : accumulating_types(ts, v)) acc[t] = 1;
  const auto saturated = static_cast<std::uint32_t>(acc_cap);

  using State = std::vector<std::uint32_t>;
  auto non_acc_total = [&](const State& s) {
    std::size_t total = 0;
    for (TypeId t = 0; t < n; ++t)
      if (!acc[t]) total += s[t];
    return total;
  };

  EllEstimate est;
  std::map<State, char> seen;
  std::deque<State> work;
  State start(n, 0);
  start[ts.init()] = 1;
  seen.emplace(start, 1);
  work.push_back(start);

  auto visit = [&](State s) {
    if (seen.contains(s)) return;
    if (seen.size() >= state_cap) {
      est.complete = false;
      return;
    }
    est.ell = std::max(est.ell, non_acc_total(s));
    seen.emplace(s, 1);
    work.push_back(std::move(s));
  };
  est.ell = non_acc_total(start);

  while (!work.empty()) {
    const State s = std::move(work.front());
    work.pop_front();
    auto pick = std::find_if(order.begin(), order.end(), [&](TypeId t) { return s[t] > 0; });
    if (pick == order.end()) continue;
    const TypeId x = *pick;

    // A saturated count stands for "at least acc_cap": after removing one
    // task it may or may not still be saturated.
    std::vector<State> after_pop;
    State popped = s;
    if (acc[x] && s[x] == saturated) {
      after_pop.push_back(popped);
      popped[x] = saturated - 1;
      after_pop.push_back(popped);
    } else {
      popped[x] -= 1;
      after_pop.push_back(popped);
    }
    for (const auto& base : after_pop) {
      for (const auto& r : ts.rules_of(x)) {
        State next = base;
        for (TypeId c : r.rhs) {
          next[c] += 1;
          if (acc[c] && next[c] > saturated) next[c] = saturated;
        }
        visit(std::move(next));
      }
    }
  }
  est.states = seen.size();
  return est;
}

LightFirstAnalysis analyze_light_first(const TaskSystem& ts, const TypedVector& v, std::optional<std::size_t> ell) {
  LightFirstAnalysis a;
  a.order = weight_order(v);
  a.accumulating = accumulating_types(ts, v);
  a.v_min = v.minCoeff();
  a.v_minmax = std::numeric_limits<double>::infinity();
  for (const auto& r : ts.rules())
    if (r.binary())
      a.v_minmax = std::min(a.v_minmax, std::max(v(static_cast<Eigen::Index>(r.rhs[0])),
                                                 v(static_cast<Eigen::Index>(r.rhs[1]))));
  a.v_minacc = std::numeric_limits<double>::infinity();
  for (TypeId t : a.accumulating) a.v_minacc = std::min(a.v_minacc, v(static_cast<Eigen::Index>(t)));
  a.ell = ell;
  return a;
}

LightFirstBounds light_first_bounds(const TaskSystem& ts, const TypedVector& v, const LightFirstAnalysis& a,
                                    std::size_t k) {
  LightFirstBounds b;
  if (k == 0) return b;
  const double v0 = v(static_cast<Eigen::Index>(ts.init()));
  const double kk = static_cast<double>(k);
  b.basic = std::clamp((v0 - 1.0) / (a.v_min * std::pow(a.v_minmax, kk - 1.0) - 1.0), 0.0, 1.0);
  if (a.ell && k >= *a.ell && std::isfinite(a.v_minacc)) {
    const double l = static_cast<double>(*a.ell);
    const double denom = std::pow(a.v_min, l) * std::pow(a.v_minacc, kk - l) - 1.0;
    b.refined = std::clamp((v0 - 1.0) / denom, 0.0, 1.0);
  }
  return b;
}

}  // namespace taskspace
