#include "support/systems.hpp"

#include "taskspace/online_bounds.hpp"
#include "taskspace/simulator.hpp"

#include <doctest.h>

#include <random>

using namespace taskspace;

namespace {

// Builds a tree from (label, parent) pairs given in creation order.
FamilyTree make_tree(const std::vector<std::pair<TypeId, std::int64_t>>& layout) {
  FamilyTree t;
  for (const auto& [label, parent] : layout) {
    const auto id = static_cast<std::int64_t>(t.nodes.size());
    t.nodes.push_back({label, 0, parent, {-1, -1}, false});
    if (parent >= 0) {
      auto& p = t.nodes[parent];
      p.child[p.child[0] < 0 ? 0 : 1] = id;
    }
  }
  return t;
}

}  // namespace

TEST_CASE("rng streams") {
  SampleRng a(1, 0), b(1, 0), c(1, 1), d(2, 0);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  CHECK(x != d.uniform());
  SampleRng r(9, 9);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 100000 - 0.5) <= 3 * std::sqrt(1.0 / 12 / 100000));
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
}

TEST_CASE("leaf system") {
  const auto ts = testsys::leaf();
  SampleRng rng(1, 0);
  const auto tree = sample_tree(ts, rng);
  REQUIRE(tree);
  CHECK(tree->size() == 1);
  CHECK(optimal_space(*tree) == 1);
  for (const auto& p : {Policy::fifo(), Policy::random(), Policy::stack(), Policy::light_first(TypedVector::Ones(1))})
    CHECK(simulate_policy(ts, p, rng).peak == 1);
}

TEST_CASE("optimal space on fixed trees") {
  CHECK(optimal_space(make_tree({{0, -1}})) == 1);
  CHECK(optimal_space(make_tree({{0, -1}, {0, 0}, {0, 0}, {0, 1}, {0, 1}, {0, 2}, {0, 2}})) == 3);
  // root with two children; the first has two leaves, the second one leaf
  const auto fig = make_tree({{0, -1}, {0, 0}, {0, 0}, {0, 1}, {0, 1}, {0, 2}});
  CHECK(optimal_space(fig) == 2);
  CHECK(fig.address(0).empty());
  CHECK(fig.address(4) == "01");
  CHECK(fig.address(5) == "10");
  // a long chain with one extra leaf per level stays at 2
  std::vector<std::pair<TypeId, std::int64_t>> chain{{0, -1}};
  for (int i = 0; i < 100000; ++i) {
    const auto at = static_cast<std::int64_t>(chain.size()) - 1;
    chain.push_back({0, at});
    chain.push_back({0, at});
  }
  CHECK(optimal_space(make_tree(chain)) == 2);
}

TEST_CASE("sampled trees are well formed") {
  const auto ts = testsys::sys_c();
  for (std::uint64_t i = 0; i < 500; ++i) {
    SampleRng rng(3, i);
    const auto tree = sample_tree(ts, rng);
    REQUIRE(tree);
    for (std::size_t n = 0; n < tree->size(); ++n) {
      const auto& node = tree->nodes[n];
      const Rule& r = ts.rule(node.rule);
      CHECK(r.lhs == node.label);
      CHECK(tree->child_count(n) == r.arity());
      if (r.arity() == 2) CHECK(tree->nodes[node.child[0]].label <= tree->nodes[node.child[1]].label);
      for (auto c : node.child)
        if (c >= 0) CHECK(static_cast<std::size_t>(c) > n);
    }
  }
}

TEST_CASE("streamed optimal space equals the materialized tree's") {
  std::mt19937_64 gen(83);
  for (int s = 0; s < 30; ++s) {
    const auto ts = s == 0 ? testsys::sys_a(0.5) : testsys::random_system(gen);
    if (!validate(ts).completes_ae) continue;
    const RuleSampler sampler(ts);
    for (std::uint64_t i = 0; i < 300; ++i) {
      for (std::size_t cap : {std::size_t{40}, kDefaultNodeCap}) {
        SampleRng a(s, i), b(s, i);
        const auto tree = sample_tree(ts, a, cap);
        const auto streamed = sample_optimal_space(ts, sampler, b, cap);
        REQUIRE(streamed.censored == !tree);
        if (tree) {
          CHECK(streamed.space == optimal_space(*tree));
          CHECK(streamed.nodes == tree->size());
          CHECK(a.next() == b.next());
        }
      }
    }
  }
}

TEST_CASE("sampled tree law") {
  const auto ts = testsys::sys_a(0.3);
  std::uint64_t single = 0;
  const std::uint64_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) {
    SampleRng rng(11, i);
    single += sample_tree(ts, rng)->size() == 1 ? 1 : 0;
  }
  CHECK(testsys::within_3se(static_cast<double>(single) / n, 0.7, n));
}

TEST_CASE("node cap censors") {
  std::uint64_t censored = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleRng r(5, i);
    censored += sample_tree(testsys::sys_a(0.5), r, 50) ? 0 : 1;
  }
  CHECK(censored > 0);
  SimulationOptions opt;
  opt.samples = 2000;
  opt.node_cap = 20;
  const auto est = estimate_tail(testsys::sys_a(0.5), Policy::fifo(), opt);
  CHECK(est.censored > 0);
  CHECK(est.used() + est.censored == est.samples);
}

TEST_CASE("policy peak is never below the optimal space of the same tree") {
  std::mt19937_64 gen(79);
  for (int s = 0; s < 20; ++s) {
    const auto ts = testsys::random_subcritical_compact(gen);
    const auto v = compute_v(ts);
    const std::vector<Policy> policies{Policy::fifo(), Policy::random(), Policy::stack(LambdaOrder(ts)),
                                       Policy::light_first(v)};
    for (std::uint64_t i = 0; i < 300; ++i) {
      SampleRng rng(s, i);
      const auto tree = sample_tree(ts, rng);
      REQUIRE(tree);
      const auto best = optimal_space(*tree);
      for (const auto& p : policies) {
        const auto run = run_policy_on_tree(ts, *tree, p, rng);
        CHECK(run.nodes == tree->size());
        CHECK(run.peak >= best);
      }
    }
  }
}

TEST_CASE("estimates on the one-type system") {
  SimulationOptions opt;
  opt.samples = 100000;
  opt.kmax = 4;
  opt.seed = 13;
  const auto crit = estimate_tail(testsys::sys_a(0.5), OptimalScheduler{}, opt);
  const double expected[] = {1.0, 0.5, 0.25, 0.125};
  for (int k = 0; k < 4; ++k) CHECK(testsys::within_3se(crit.tail[k], expected[k], crit.used()));

  opt.kmax = 3;
  const auto stack = estimate_tail(testsys::sys_a(0.3), Policy::stack(), opt);
  CHECK(testsys::within_3se(stack.tail[2], 0.09 / 0.79, stack.used()));
}

TEST_CASE("estimates are deterministic across runs and thread counts") {
  const auto ts = testsys::sys_c();
  SimulationOptions opt;
  opt.samples = 20000;
  opt.kmax = 8;
  opt.seed = 17;
  const auto v = make_certificate(ts).v;
  const std::vector<Scheduler> schedulers{OptimalScheduler{}, Policy::fifo(), Policy::random(),
                                          Policy::stack(LambdaOrder(ts)), Policy::light_first(v)};
  for (const auto& sched : schedulers) {
    const auto serial = estimate_tail_serial(ts, sched, opt);
    CHECK(serial == estimate_tail_serial(ts, sched, opt));
    for (int threads : {1, 2, 3, 8}) {
      auto o = opt;
      o.threads = threads;
      CHECK(estimate_tail(ts, sched, o) == serial);
    }
    CHECK(serial.tail[0] == 1.0);
    for (std::size_t k = 1; k < serial.tail.size(); ++k) CHECK(serial.tail[k] <= serial.tail[k - 1]);
  }
}

TEST_CASE("no censoring on subcritical systems at the default cap") {
  for (const auto& ts : {testsys::sys_a(0.3), testsys::sys_a(0.49), testsys::sys_c()}) {
    SimulationOptions opt;
    opt.samples = 1000000;
    opt.kmax = 2;
    opt.seed = 19;
    CHECK(estimate_tail(ts, Policy::fifo(), opt).censored == 0);
  }
}
