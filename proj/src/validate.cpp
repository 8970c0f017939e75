#include "taskspace/validate.hpp"

#include "taskspace/error.hpp"
#include "taskspace/linalg.hpp"
#include "taskspace/newton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace taskspace {

bool ValidationReport::compact() const noexcept { return compact_types.size() == type_count; }

TypedVector least_fixed_point(const TaskSystem& ts, double tol, std::size_t max_iter) {
  const NewtonKernel newton(ts);
  TypedVector e = TypedVector::Ones(static_cast<Eigen::Index>(ts.size()));
  for (std::size_t it = 0; it < max_iter; ++it) {
    auto next = newton.step(e);
    TypedVector e_next = next ? *next : newton.kleene(e);
    const double delta = inf_norm(TypedVector(e - e_next));
    e = std::move(e_next);
    if (delta <= tol) return (TypedVector::Ones(e.size()) - e).cwiseMax(0.0).cwiseMin(1.0);
  }
  throw Error(ErrorKind::IterationCap, "least fixed point iteration did not converge");
}

std::vector<bool> reachable_from(const TaskSystem& ts, TypeId from) {
  std::vector<bool> seen(ts.size(), false);
  std::deque<TypeId> work{from};
  seen[from] = true;
  while (!work.empty()) {
    const TypeId t = work.front();
    work.pop_front();
    for (const auto& r : ts.rules_of(t))
      for (TypeId c : r.rhs)
        if (!seen[c]) {
          seen[c] = true;
          work.push_back(c);
        }
  }
  return seen;
}

namespace {

// Compactness over an explicit rule list (types may have lost all rules).
std::vector<bool> compact_mask(std::size_t n, const std::vector<Rule>& rules) {
  // Backward search from lhs of two-child rules along reversed edges.
  std::vector<std::vector<TypeId>> preds(n);
  for (const auto& r : rules)
    for (TypeId c : r.rhs) preds[c].push_back(r.lhs);
  std::vector<bool> compact(n, false);
  std::deque<TypeId> work;
  for (const auto& r : rules)
    if (r.binary() && !compact[r.lhs]) {
      compact[r.lhs] = true;
      work.push_back(r.lhs);
    }
  while (!work.empty()) {
    const TypeId t = work.front();
    work.pop_front();
    for (TypeId p : preds[t])
      if (!compact[p]) {
        compact[p] = true;
        work.push_back(p);
      }
  }
  return compact;
}

}  // namespace

std::vector<TypeId> compact_types(const TaskSystem& ts) {
  const auto mask = compact_mask(ts.size(), std::vector<Rule>(ts.rules().begin(), ts.rules().end()));
  std::vector<TypeId> out;
  for (TypeId t = 0; t < ts.size(); ++t)
    if (mask[t]) out.push_back(t);
  return out;
}

bool is_compact(const TaskSystem& ts) { return compact_types(ts).size() == ts.size(); }

ValidationReport validate(const TaskSystem& ts, double tol) {
  ValidationReport rep;
  rep.type_count = ts.size();
  for (TypeId t = 0; t < ts.size(); ++t) {
    double sum = 0.0;
    for (const auto& r : ts.rules_of(t)) sum += r.prob;
    rep.max_prob_sum_error = std::max(rep.max_prob_sum_error, std::abs(sum - 1.0));
  }
  rep.prob_sums_ok = rep.max_prob_sum_error <= kProbSumTol;

  const auto reach = reachable_from(ts, ts.init());
  for (TypeId t = 0; t < ts.size(); ++t)
    if (!reach[t]) rep.unreachable_types.push_back(t);

  // Converge well below tol so the gap reflects the fixed point, not the
  // stopping rule (critical systems converge only linearly).
  rep.lfp = least_fixed_point(ts, std::max(tol * 1e-2, 1e-15));
  rep.lfp_gap = inf_norm(TypedVector(TypedVector::Ones(rep.lfp.size()) - rep.lfp));
  rep.completes_ae = rep.lfp_gap <= tol;
  rep.compact_types = compact_types(ts);
  return rep;
}

Compaction compact(const TaskSystem& ts) {
  const std::size_t n = ts.size();
  std::vector<Rule> rules(ts.rules().begin(), ts.rules().end());
  std::vector<bool> alive(n, true);

  for (;;) {
    auto mask = compact_mask(n, rules);
    bool changed = false;
    for (TypeId t = 0; t < n; ++t)
      if (alive[t] && !mask[t]) {
        alive[t] = false;
        changed = true;
      }
    if (!changed) break;
    std::vector<Rule> kept;
    for (auto& r : rules) {
      if (!alive[r.lhs]) continue;
      std::erase_if(r.rhs, [&](TypeId c) { return !alive[c]; });
      kept.push_back(std::move(r));
    }
    rules = std::move(kept);
  }

  std::vector<TypeId> removed;
  for (TypeId t = 0; t < n; ++t)
    if (!alive[t]) removed.push_back(t);
  if (!alive[ts.init()]) throw InitNotCompactError(removed.size());

  std::vector<TypeId> remap(n, 0);
  std::vector<std::string> names;
  for (TypeId t = 0; t < n; ++t)
    if (alive[t]) {
      remap[t] = names.size();
      names.push_back(ts.name(t));
    }
  for (auto& r : rules) {
    r.lhs = remap[r.lhs];
    for (auto& c : r.rhs) c = remap[c];
  }
  return Compaction{TaskSystem(std::move(names), std::move(rules), remap[ts.init()]), std::move(removed)};
}

}  // namespace taskspace
