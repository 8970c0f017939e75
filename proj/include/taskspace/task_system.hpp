#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace taskspace {

using TypeId = std::size_t;

/// Dense real vector indexed by task type.
using TypedVector = Eigen::VectorXd;
/// Dense square real matrix indexed by (task type, task type).
using TypedMatrix = Eigen::MatrixXd;

inline constexpr double kProbSumTol = 1e-9;

struct Rule {
  TypeId lhs = 0;
  std::vector<TypeId> rhs;  // 0..2 children in written order
  double prob = 0.0;

  std::size_t arity() const noexcept { return rhs.size(); }
  bool binary() const noexcept { return rhs.size() == 2; }
};

/// A stochastic task system: types, probabilistic spawn rules with at most two
/// children, and an initial type. Immutable once built.
///
/// The constructor checks the structural invariants (positive probabilities,
/// arity <= 2, per-type sums equal to 1, every type has a rule), merges rules
/// whose right-hand sides are equal as multisets, and groups rules by lhs in
/// type order. Rule indices used elsewhere (e.g. depth-first orders) refer to
/// this grouped order.
class TaskSystem {
 public:
  TaskSystem(std::vector<std::string> names, std::vector<Rule> rules, TypeId init);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t rule_count() const noexcept { return rules_.size(); }

  std::span<const Rule> rules() const noexcept { return rules_; }
  const Rule& rule(std::size_t i) const { return rules_.at(i); }
  /// Rules with lhs `t`, as a contiguous slice of rules().
  std::span<const Rule> rules_of(TypeId t) const;
  /// Index in rules() of the first rule with lhs `t`.
  std::size_t first_rule_of(TypeId t) const { return offsets_.at(t); }

  const std::string& name(TypeId t) const { return names_.at(t); }
  std::span<const std::string> names() const noexcept { return names_; }
  std::optional<TypeId> find(std::string_view name) const;

  TypeId init() const noexcept { return init_; }

  bool has_binary_rule(TypeId t) const;

 private:
  std::vector<std::string> names_;
  std::vector<Rule> rules_;
  std::vector<std::size_t> offsets_;  // size() + 1 entries
  TypeId init_;
};

/// Parses the line-based text format:
///
///     # comment
///     init X
///     X -> X X : 0.2
///     X -> : 1/2
///
/// `;` may separate several statements on one line. Without an `init` line the
/// lhs of the first rule is initial. Types are numbered in order of first
/// appearance.
TaskSystem parse_task_system(std::string_view text);

TaskSystem load_task_system(const std::string& path);

/// Renders a system back into the text format (round-trips through the parser).
std::string to_text(const TaskSystem& ts);

}  // namespace taskspace
