#include "taskspace/simulator.hpp"

#include "taskspace/light_first.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace taskspace {

std::string FamilyTree::address(std::size_t i) const {
  std::string word;
  for (auto at = static_cast<std::int64_t>(i); nodes.at(at).parent >= 0;) {
    const auto& parent = nodes[nodes[at].parent];
    word.push_back(parent.child[0] == at ? '0' : '1');
    at = nodes[at].parent;
  }
  std::reverse(word.begin(), word.end());
  return word;
}

RuleSampler::RuleSampler(const TaskSystem& ts) : cumulative_(ts.rule_count()), shapes_(ts.rule_count()) {
  for (TypeId t = 0; t < ts.size(); ++t) {
    double acc = 0.0;
    const std::size_t base = ts.first_rule_of(t);
    offsets_.push_back(base);
    const auto rules = ts.rules_of(t);
    for (std::size_t j = 0; j < rules.size(); ++j) {
      acc += rules[j].prob;
      cumulative_[base + j] = acc;
      auto& shape = shapes_[base + j];
      shape.arity = static_cast<std::uint32_t>(rules[j].arity());
      shape.rhs = {0, 0};
      std::copy(rules[j].rhs.begin(), rules[j].rhs.end(), shape.rhs.begin());
    }
  }
  offsets_.push_back(ts.rule_count());
}

std::size_t RuleSampler::draw(TypeId t, double u) const {
  const std::size_t lo = offsets_[t];
  const std::size_t hi = offsets_[t + 1];
  const double target = u * cumulative_[hi - 1];
  for (std::size_t i = lo; i + 1 < hi; ++i)
    if (target < cumulative_[i]) return i;
  return hi - 1;
}

std::optional<FamilyTree> sample_tree(const TaskSystem& ts, SampleRng& rng, std::size_t node_cap) {
  return sample_tree(ts, ts.init(), rng, node_cap);
}

std::optional<FamilyTree> sample_tree(const TaskSystem& ts, TypeId root, SampleRng& rng, std::size_t node_cap) {
  return sample_tree(ts, RuleSampler(ts), root, rng, node_cap);
}

std::optional<FamilyTree> sample_tree(const TaskSystem& ts, const RuleSampler& sampler, TypeId root, SampleRng& rng,
                                      std::size_t node_cap) {
  FamilyTree tree;
  tree.nodes.push_back({root, 0, -1, {-1, -1}, false});
  std::vector<std::size_t> pending{0};
  while (!pending.empty()) {
    const std::size_t at = pending.back();
    pending.pop_back();
    const std::size_t ri = sampler.draw(tree.nodes[at].label, rng.uniform());
    const Rule& r = ts.rule(ri);
    tree.nodes[at].rule = ri;
    if (tree.nodes.size() + r.arity() > node_cap) return std::nullopt;
    std::array<TypeId, 2> labels{};
    std::copy(r.rhs.begin(), r.rhs.end(), labels.begin());
    if (r.binary() && labels[1] < labels[0]) {
      std::swap(labels[0], labels[1]);
      tree.nodes[at].swapped = true;
    }
    for (std::size_t c = 0; c < r.arity(); ++c) {
      const auto id = static_cast<std::int64_t>(tree.nodes.size());
      tree.nodes.push_back({labels[c], 0, static_cast<std::int64_t>(at), {-1, -1}, false});
      tree.nodes[at].child[c] = id;
      pending.push_back(static_cast<std::size_t>(id));
    }
  }
  return tree;
}

namespace {

std::size_t combine(std::size_t a, std::size_t b) { return std::min(std::max(a + 1, b), std::max(a, b + 1)); }

}  // namespace

std::size_t optimal_space(const FamilyTree& tree) {
  // Children have larger indices than parents, so a reverse sweep is a
  // post-order evaluation.
  std::vector<std::size_t> s(tree.size(), 1);
  for (std::size_t i = tree.size(); i-- > 0;) {
    const auto& n = tree.nodes[i];
    if (n.child[1] >= 0) {
      const std::size_t a = s[n.child[0]], b = s[n.child[1]];
      s[i] = combine(a, b);
    } else if (n.child[0] >= 0) {
      s[i] = s[n.child[0]];
    }
  }
  return tree.size() == 0 ? 0 : s[0];
}

SpaceSample sample_optimal_space(const TaskSystem& ts, const RuleSampler& sampler, SampleRng& rng,
                                 std::size_t node_cap) {
  // One frame per open internal node; children are expanded last-first,
  // matching the pop order of sample_tree's work stack.
  struct Frame {
    std::array<TypeId, 2> child;
    std::array<std::size_t, 2> value;
    std::uint8_t arity;
    std::uint8_t next;
  };
  SpaceSample out;
  out.nodes = 1;
  std::vector<Frame> stack;
  auto open = [&](TypeId t) -> bool {
    const auto& r = sampler.shape(sampler.draw(t, rng.uniform()));
    if (r.arity == 0) return false;
    if (out.nodes + r.arity > node_cap) {
      out.censored = true;
      return false;
    }
    out.nodes += r.arity;
    Frame f{r.rhs, {0, 0}, static_cast<std::uint8_t>(r.arity), static_cast<std::uint8_t>(r.arity)};
    if (r.arity == 2 && f.child[1] < f.child[0]) std::swap(f.child[0], f.child[1]);
    stack.push_back(f);
    return true;
  };
  if (!open(ts.init())) {
    if (!out.censored) out.space = 1;
    return out;
  }
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next > 0) {
      --f.next;
      const TypeId c = f.child[f.next];
      f.value[f.next] = 1;
      open(c);
      if (out.censored) return out;
      continue;
    }
    const std::size_t v = f.arity == 2 ? combine(f.value[0], f.value[1]) : f.value[0];
    stack.pop_back();
    if (stack.empty())
      out.space = v;
    else
      stack.back().value[stack.back().next] = v;
  }
  return out;
}

Policy Policy::light_first(const TypedVector& v) { return {Kind::LightFirst, {}, weight_order(v)}; }

std::string to_string(Policy::Kind kind) {
  switch (kind) {
    case Policy::Kind::Fifo: return "fifo";
    case Policy::Kind::Random: return "random";
    case Policy::Kind::Stack: return "stack";
    case Policy::Kind::LightFirst: return "light-first";
  }
  return "?";
}

namespace {

template <class Item>
class Pool {
 public:
  Pool(const Policy& policy, std::size_t types) : kind_(policy.kind) {
    if (kind_ == Policy::Kind::LightFirst) {
      order_ = policy.order;
      buckets_.resize(types);
    }
  }

  void push(Item item, TypeId type) {
    ++size_;
    switch (kind_) {
      case Policy::Kind::Fifo: fifo_.push_back(item); break;
      case Policy::Kind::Random:
      case Policy::Kind::Stack: items_.push_back(item); break;
      case Policy::Kind::LightFirst: buckets_[type].push_back(item); break;
    }
  }

  Item pop(SampleRng& rng) {
    --size_;
    Item out{};
    switch (kind_) {
      case Policy::Kind::Fifo:
        out = fifo_.front();
        fifo_.pop_front();
        break;
      case Policy::Kind::Stack:
        out = items_.back();
        items_.pop_back();
        break;
      case Policy::Kind::Random: {
        const std::size_t i = rng.below(items_.size());
        out = items_[i];
        items_[i] = items_.back();
        items_.pop_back();
        break;
      }
      case Policy::Kind::LightFirst:
        for (TypeId t : order_) {
          if (!buckets_[t].empty()) {
            out = buckets_[t].back();
            buckets_[t].pop_back();
            break;
          }
        }
        break;
    }
    return out;
  }

  std::size_t size() const noexcept { return size_; }

 private:
  Policy::Kind kind_;
  std::size_t size_ = 0;
  std::deque<Item> fifo_;
  std::vector<Item> items_;
  std::vector<TypeId> order_;
  std::vector<std::vector<Item>> buckets_;
};

struct Expansion {
  TypeId type = 0;
  std::size_t rule = 0;
  std::size_t count = 0;
  std::array<std::pair<std::uint64_t, TypeId>, 2> children{};  // written order
};

template <class Expand>
PolicyRun run_pool(std::size_t types, const Policy& policy, SampleRng& rng, std::uint64_t root, TypeId root_type,
                   std::size_t node_cap, Expand expand) {
  PolicyRun run;
  run.type_peaks.assign(types, 0);
  std::vector<std::size_t> counts(types, 0);
  Pool<std::uint64_t> pool(policy, types);
  pool.push(root, root_type);
  counts[root_type] = 1;
  run.type_peaks[root_type] = 1;
  run.peak = 1;
  while (pool.size() > 0) {
    if (run.nodes >= node_cap) {
      run.censored = true;
      return run;
    }
    const std::uint64_t item = pool.pop(rng);
    ++run.nodes;
    const Expansion e = expand(item);
    --counts[e.type];
    std::array<std::size_t, 2> at{0, 1};
    if (policy.kind == Policy::Kind::Stack && e.count == 2 && !policy.lambda.swapped(e.rule)) {
      // first-executed child must end up on top
      at = {1, 0};
    }
    for (std::size_t j = 0; j < e.count; ++j) {
      const auto& [child, type] = e.children[e.count == 2 ? at[j] : j];
      pool.push(child, type);
      run.type_peaks[type] = std::max(run.type_peaks[type], ++counts[type]);
    }
    run.peak = std::max(run.peak, pool.size());
  }
  return run;
}

}  // namespace

PolicyRun simulate_policy(const TaskSystem& ts, const Policy& policy, SampleRng& rng, std::size_t node_cap) {
  return simulate_policy(ts, RuleSampler(ts), policy, rng, node_cap);
}

PolicyRun simulate_policy(const TaskSystem& ts, const RuleSampler& sampler, const Policy& policy, SampleRng& rng,
                          std::size_t node_cap) {
  return run_pool(ts.size(), policy, rng, ts.init(), ts.init(), node_cap, [&](std::uint64_t item) {
    Expansion e;
    e.type = static_cast<TypeId>(item);
    e.rule = sampler.draw(static_cast<TypeId>(item), rng.uniform());
    const auto& r = sampler.shape(e.rule);
    e.count = r.arity;
    for (std::size_t j = 0; j < e.count; ++j) e.children[j] = {r.rhs[j], r.rhs[j]};
    return e;
  });
}

PolicyRun run_policy_on_tree(const TaskSystem& ts, const FamilyTree& tree, const Policy& policy, SampleRng& rng) {
  if (tree.size() == 0) throw std::invalid_argument("empty tree");
  return run_pool(ts.size(), policy, rng, 0, tree.nodes[0].label, tree.size(), [&](std::uint64_t item) {
    const auto& n = tree.nodes[item];
    Expansion e;
    e.type = n.label;
    e.rule = n.rule;
    e.count = tree.child_count(item);
    for (std::size_t j = 0; j < e.count; ++j) {
      const std::size_t stored = (n.swapped && e.count == 2) ? 1 - j : j;
      const auto id = static_cast<std::uint64_t>(n.child[stored]);
      e.children[j] = {id, tree.nodes[id].label};
    }
    return e;
  });
}

namespace {

using Wide = unsigned __int128;

struct Accumulator {
  std::vector<std::uint64_t> hits;
  std::uint64_t censored = 0;
  Wide sum_peak = 0, sumsq_peak = 0, sum_nodes = 0, sumsq_nodes = 0;
  std::size_t max_peak = 0;
  std::vector<std::size_t> max_type_peaks;

  Accumulator(std::size_t kmax, std::size_t types) : hits(kmax, 0), max_type_peaks(types, 0) {}

  void add(const PolicyRun& run) {
    if (run.censored) {
      ++censored;
      return;
    }
    for (std::size_t k = 1; k <= hits.size() && k <= run.peak; ++k) ++hits[k - 1];
    sum_peak += run.peak;
    sumsq_peak += static_cast<Wide>(run.peak) * run.peak;
    sum_nodes += run.nodes;
    sumsq_nodes += static_cast<Wide>(run.nodes) * run.nodes;
    max_peak = std::max(max_peak, run.peak);
    for (std::size_t t = 0; t < run.type_peaks.size(); ++t)
      max_type_peaks[t] = std::max(max_type_peaks[t], run.type_peaks[t]);
  }

  void merge(const Accumulator& o) {
    for (std::size_t k = 0; k < hits.size(); ++k) hits[k] += o.hits[k];
    censored += o.censored;
    sum_peak += o.sum_peak;
    sumsq_peak += o.sumsq_peak;
    sum_nodes += o.sum_nodes;
    sumsq_nodes += o.sumsq_nodes;
    max_peak = std::max(max_peak, o.max_peak);
    for (std::size_t t = 0; t < max_type_peaks.size(); ++t)
      max_type_peaks[t] = std::max(max_type_peaks[t], o.max_type_peaks[t]);
  }
};

std::pair<double, double> mean_and_stderr(Wide sum, Wide sumsq, std::uint64_t n) {
  if (n == 0) return {0.0, 0.0};
  const long double s = static_cast<long double>(sum);
  const long double mean = s / n;
  if (n < 2) return {static_cast<double>(mean), 0.0};
  const long double var = std::max(0.0L, (static_cast<long double>(sumsq) - s * mean) / (n - 1));
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

PolicyRun run_sample(const TaskSystem& ts, const RuleSampler& sampler, const Scheduler& scheduler,
                     const SimulationOptions& opt, std::uint64_t index) {
  SampleRng rng(opt.seed, index);
  if (const auto* policy = std::get_if<Policy>(&scheduler))
    return simulate_policy(ts, sampler, *policy, rng, opt.node_cap);
  const auto sample = sample_optimal_space(ts, sampler, rng, opt.node_cap);
  PolicyRun run;
  run.censored = sample.censored;
  run.peak = sample.space;
  run.nodes = sample.nodes;
  return run;
}

std::size_t type_count_for(const TaskSystem& ts, const Scheduler& scheduler) {
  return std::holds_alternative<Policy>(scheduler) ? ts.size() : 0;
}

TailEstimate finish(const Accumulator& acc, const SimulationOptions& opt) {
  TailEstimate out;
  out.samples = opt.samples;
  out.censored = acc.censored;
  out.seed = opt.seed;
  out.hits = acc.hits;
  const std::uint64_t n = out.used();
  out.tail.resize(acc.hits.size(), 0.0);
  out.standard_error.resize(acc.hits.size(), 0.0);
  for (std::size_t k = 0; k < acc.hits.size() && n > 0; ++k) {
    const double t = static_cast<double>(acc.hits[k]) / static_cast<double>(n);
    out.tail[k] = t;
    out.standard_error[k] = std::sqrt(t * (1.0 - t) / static_cast<double>(n));
  }
  std::tie(out.mean_peak, out.mean_peak_stderr) = mean_and_stderr(acc.sum_peak, acc.sumsq_peak, n);
  std::tie(out.mean_nodes, out.mean_nodes_stderr) = mean_and_stderr(acc.sum_nodes, acc.sumsq_nodes, n);
  out.max_peak = acc.max_peak;
  out.max_type_peaks = acc.max_type_peaks;
  return out;
}

}  // namespace

TailEstimate estimate_tail_serial(const TaskSystem& ts, const Scheduler& scheduler, const SimulationOptions& opt) {
  const RuleSampler sampler(ts);
  Accumulator acc(opt.kmax, type_count_for(ts, scheduler));
  for (std::uint64_t i = 0; i < opt.samples; ++i) acc.add(run_sample(ts, sampler, scheduler, opt, i));
  return finish(acc, opt);
}

TailEstimate estimate_tail(const TaskSystem& ts, const Scheduler& scheduler, const SimulationOptions& opt) {
  const RuleSampler sampler(ts);
  const std::size_t types = type_count_for(ts, scheduler);
  Accumulator total(opt.kmax, types);
  const auto n = static_cast<std::int64_t>(opt.samples);
#ifdef _OPENMP
  const int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
#endif
  {
    Accumulator local(opt.kmax, types);
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64) nowait
#endif
    for (std::int64_t i = 0; i < n; ++i) local.add(run_sample(ts, sampler, scheduler, opt, static_cast<std::uint64_t>(i)));
#ifdef _OPENMP
#pragma omp critical(taskspace_tail_merge)
#endif
    total.merge(local);
  }
  return finish(total, opt);
}

}  // namespace taskspace
