#pragma once

#include "taskspace/depth_first.hpp"
#include "taskspace/rng.hpp"
#include "taskspace/task_system.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace taskspace {

/// A family tree: node 0 is the root, children always have larger indices
/// than their parent. Two children are stored in the fixed type order
/// (declaration order), label(child[0]) <= label(child[1]).
struct FamilyTree {
  struct Node {
    TypeId label = 0;
    std::size_t rule = 0;  // index into TaskSystem::rules()
    std::int64_t parent = -1;
    std::int64_t child[2] = {-1, -1};
    bool swapped = false;  // children stored opposite to the rule's written order
  };

  std::vector<Node> nodes;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t child_count(std::size_t i) const {
    return (nodes[i].child[0] >= 0 ? 1u : 0u) + (nodes[i].child[1] >= 0 ? 1u : 0u);
  }
  /// Node name as a word over {0,1} (root is the empty word).
  std::string address(std::size_t i) const;
};

inline constexpr std::size_t kDefaultNodeCap = 10000000;

/// Draws rules by inverse-CDF lookup on per-type cumulative tables.
class RuleSampler {
 public:
  struct Shape {
    std::uint32_t arity;
    std::array<TypeId, 2> rhs;  // written order
  };

  explicit RuleSampler(const TaskSystem& ts);
  std::size_t draw(TypeId t, double u) const;
  const Shape& shape(std::size_t rule) const { return shapes_[rule]; }

 private:
  std::vector<double> cumulative_;
  std::vector<std::size_t> offsets_;
  std::vector<Shape> shapes_;
};

/// Samples a family tree rooted at `root` (default: the initial type).
/// nullopt means censored: the tree would exceed `node_cap` nodes.
std::optional<FamilyTree> sample_tree(const TaskSystem& ts, SampleRng& rng, std::size_t node_cap = kDefaultNodeCap);
std::optional<FamilyTree> sample_tree(const TaskSystem& ts, TypeId root, SampleRng& rng, std::size_t node_cap);
std::optional<FamilyTree> sample_tree(const TaskSystem& ts, const RuleSampler& sampler, TypeId root, SampleRng& rng,
                                      std::size_t node_cap);

/// Minimal completion space over all derivations of the tree:
/// 1 at leaves, the child's value for one child, and
/// min(max(a+1, b), max(a, b+1)) for two children with values a, b.
std::size_t optimal_space(const FamilyTree& tree);

struct SpaceSample {
  std::size_t space = 0;
  std::size_t nodes = 0;
  bool censored = false;
};

/// optimal_space(sample_tree(...)) without storing the tree: the recursion is
/// evaluated while the tree is generated, consuming the same random draws in
/// the same order.
SpaceSample sample_optimal_space(const TaskSystem& ts, const RuleSampler& sampler, SampleRng& rng,
                                 std::size_t node_cap = kDefaultNodeCap);

struct Policy {
  enum class Kind { Fifo, Random, Stack, LightFirst };

  Kind kind = Kind::Fifo;
  LambdaOrder lambda;          // Stack
  std::vector<TypeId> order;   // LightFirst: lightest first

  static Policy fifo() { return {Kind::Fifo, {}, {}}; }
  static Policy random() { return {Kind::Random, {}, {}}; }
  static Policy stack(LambdaOrder lambda = {}) { return {Kind::Stack, std::move(lambda), {}}; }
  static Policy light_first(const TypedVector& v);
};

std::string to_string(Policy::Kind kind);

struct PolicyRun {
  std::size_t peak = 0;
  std::size_t nodes = 0;
  /// Largest simultaneous pool count per type.
  std::vector<std::size_t> type_peaks;
  bool censored = false;
};

/// Runs the pool semantics with lazily sampled rules: pick a task per policy,
/// draw its rule, put the children back. Returns the peak pool size.
PolicyRun simulate_policy(const TaskSystem& ts, const Policy& policy, SampleRng& rng,
                          std::size_t node_cap = kDefaultNodeCap);
PolicyRun simulate_policy(const TaskSystem& ts, const RuleSampler& sampler, const Policy& policy, SampleRng& rng,
                          std::size_t node_cap);

/// Executes a given tree under `policy` (rng only used by Random).
PolicyRun run_policy_on_tree(const TaskSystem& ts, const FamilyTree& tree, const Policy& policy, SampleRng& rng);

struct OptimalScheduler {};
using Scheduler = std::variant<OptimalScheduler, Policy>;

struct SimulationOptions {
  std::uint64_t samples = 100000;
  std::size_t kmax = 10;
  std::uint64_t seed = 1;
  std::size_t node_cap = kDefaultNodeCap;
  /// 0: OpenMP default.
  int threads = 0;
};

struct TailEstimate {
  /// tail[k-1] = empirical P(S >= k), k = 1..kmax, over uncensored samples.
  std::vector<double> tail;
  std::vector<double> standard_error;
  std::vector<std::uint64_t> hits;
  std::uint64_t samples = 0;
  std::uint64_t censored = 0;
  std::uint64_t seed = 0;
  double mean_peak = 0.0;
  double mean_peak_stderr = 0.0;
  double mean_nodes = 0.0;
  double mean_nodes_stderr = 0.0;
  std::size_t max_peak = 0;
  /// Largest simultaneous count per type over all runs (policies only).
  std::vector<std::size_t> max_type_peaks;

  std::uint64_t used() const noexcept { return samples - censored; }
  bool operator==(const TailEstimate&) const = default;
};

/// Monte Carlo estimate of P(S >= k); OpenMP-parallel over samples.
/// Sample i always uses SampleRng(seed, i), so the result is bit-identical
/// for any thread count and equal to estimate_tail_serial.
TailEstimate estimate_tail(const TaskSystem& ts, const Scheduler& scheduler, const SimulationOptions& opt);

/// Single-threaded reference implementation of estimate_tail.
TailEstimate estimate_tail_serial(const TaskSystem& ts, const Scheduler& scheduler, const SimulationOptions& opt);

}  // namespace taskspace
