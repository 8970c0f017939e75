#include "support/systems.hpp"

#include "taskspace/error.hpp"
#include "taskspace/online_bounds.hpp"
#include "taskspace/pgf.hpp"
#include "taskspace/simulator.hpp"

#include <doctest.h>

#include <random>

using namespace taskspace;

TEST_CASE("compute_v examples") {
  CHECK(compute_v(testsys::sys_a(0.3))(0) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(compute_v(testsys::sys_a(0.4))(0) == doctest::Approx(1.5).epsilon(1e-14));
  const auto ts = testsys::sys_c();
  const auto v = compute_v(ts);
  CHECK(v.minCoeff() > 1.0);
  CHECK((v - pgf_eval(ts, v)).minCoeff() >= -1e-9);
}

TEST_CASE("compute_v and compute_w preconditions") {
  CHECK_THROWS_AS(compute_v(testsys::sys_d()), Error);
  CHECK_THROWS_AS(compute_v(testsys::sys_a(0.5)), Error);
  CHECK_THROWS_AS(compute_w(testsys::sys_a(0.5)), Error);
  CHECK_THROWS_AS(compute_w(testsys::sys_a(0.3), 1.0), std::invalid_argument);
}

TEST_CASE("compute_w examples") {
  const auto a = testsys::sys_a(0.3);
  const auto w = compute_w(a, 1.5);
  CHECK(w(0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(pgf_eval(a, w)(0) == doctest::Approx(11.5).epsilon(1e-14));

  const auto edge = compute_w(a, 1.0 + 1e-9);
  CHECK(edge(0) == doctest::Approx(13.0 / 3.0).epsilon(1e-8));
  CHECK(pgf_eval(a, edge)(0) - edge(0) >= 0.0);

  const auto c = testsys::sys_c();
  const auto wc = compute_w(c, 1.5);
  CHECK(wc.minCoeff() > 1.0);
  CHECK((pgf_eval(c, wc) - wc).minCoeff() >= -1e-9);
}

TEST_CASE("compute_w when the solution has entries below one") {
  // x = (I - f'(1))^-1 y has min entry < 1 here; the plain threshold
  // 1/(c x_min) is then too small for f(w) >= w.
  const TaskSystem ts({"W", "X"}, {{0, {1, 1}, 0.5}, {0, {}, 0.5}, {1, {0}, 0.01}, {1, {}, 0.99}}, 0);
  const auto w = compute_w(ts, 1.5);
  CHECK((pgf_eval(ts, w) - w).minCoeff() >= -1e-9);
  CHECK(w.minCoeff() > 1.0);
}

TEST_CASE("tail bounds examples") {
  const auto a = testsys::sys_a(0.3);
  TypedVector v(1);
  v << 7.0 / 3.0;
  const auto cert = make_certificate(a, v, v);
  CHECK(cert.valid(1e-9));
  CHECK(online_tail_bounds(cert, 0, 2).upper == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(online_tail_bounds(cert, 0, 3).upper == doctest::Approx(testsys::one_type_tail(0.3, 3)).epsilon(1e-14));
  CHECK(online_tail_bounds(cert, 0, 3).upper == doctest::Approx(0.1139240506).epsilon(1e-9));
  CHECK(online_tail_bounds(cert, 0, 1).upper == 1.0);
  for (std::size_t k = 1; k <= 10; ++k) {
    const auto b = online_tail_bounds(cert, 0, k);
    CHECK(b.lower <= b.upper);
    CHECK(b.lower >= 0.0);
  }
}

TEST_CASE("refinement finds the greatest fixed point") {
  const auto cert = make_certificate(testsys::sys_a(0.3), kDefaultMargin, true);
  CHECK(cert.refined);
  CHECK(cert.v(0) == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  const auto c = make_certificate(testsys::sys_c(), kDefaultMargin, true);
  CHECK(c.refined);
  CHECK(c.v(0) == doctest::Approx(2.95).epsilon(1e-9));
  CHECK(c.v(1) == doctest::Approx(0.5 / 0.11).epsilon(1e-9));
}

TEST_CASE("certificates are valid on random compact subcritical systems") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const auto ts = testsys::random_subcritical_compact(rng);
    for (bool refine : {false, true}) {
      const auto cert = make_certificate(ts, kDefaultMargin, refine);
      CHECK(cert.valid(kCertificateTol));
      CHECK(cert.v_min == cert.v.minCoeff());
      CHECK(cert.w_max == cert.w.maxCoeff());
    }
  }
}

TEST_CASE("empirical tails of all online policies lie in the bounds") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 6; ++i) {
    const auto ts = testsys::random_subcritical_compact(rng);
    const auto cert = make_certificate(ts);
    const std::vector<Policy> policies{Policy::fifo(), Policy::random(), Policy::stack(LambdaOrder(ts)),
                                       Policy::light_first(cert.v)};
    for (const auto& policy : policies) {
      SimulationOptions opt;
      opt.samples = 20000;
      opt.kmax = 6;
      opt.seed = 100 + i;
      const auto est = estimate_tail(ts, policy, opt);
      const double n = static_cast<double>(est.used());
      for (std::size_t k = 2; k <= 6; ++k) {
        const auto b = online_tail_bounds(cert, ts.init(), k);
        const double p = est.tail[k - 1];
        CHECK((p >= b.lower || testsys::within_3se(p, b.lower, n)));
        CHECK((p <= b.upper || testsys::within_3se(p, b.upper, n)));
      }
    }
  }
}

TEST_CASE("all online policies agree with the one-type closed form") {
  const auto ts = testsys::sys_a(0.3);
  const auto cert = make_certificate(ts);
  for (const auto& policy : {Policy::fifo(), Policy::random(), Policy::stack(), Policy::light_first(cert.v)}) {
    SimulationOptions opt;
    opt.samples = 100000;
    opt.kmax = 6;
    opt.seed = 7;
    const auto est = estimate_tail(ts, policy, opt);
    for (int k = 2; k <= 6; ++k)
      CHECK(testsys::within_3se(est.tail[k - 1], testsys::one_type_tail(0.3, k), static_cast<double>(est.used())));
  }
}
