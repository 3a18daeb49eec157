#include <doctest.h>

#include <cmath>

#include "cda/expansion.hpp"
#include "cda/mc.hpp"

using namespace cda;

TEST_SUITE_BEGIN("mc");

TEST_CASE("level-crossing estimator against the exact exponential law") {
  auto m = IncrementModel::make("centered_exponential");
  for (double d : {0.1, 0.2}) {
    double th1 = m.conjugate_theta1(d);
    for (double x : {5.0, 10.0}) {
      auto est = is_crossing_prob(m, th1 - d, x, 40000, 42);
      double want = std::exp(-d * (x + 1.0));
      CHECK(std::fabs(est.mean - want) <= 3.0 * est.std_error);
      CHECK(est.mean > 0.0);
      CHECK(est.mean <= std::exp(-d * x));  // pathwise S_tau > x
    }
  }
}

TEST_CASE("level crossing at a tiny level stays a probability") {
  auto m = IncrementModel::make("gaussian");
  auto est = is_crossing_prob(m, -0.15, 0.01, 5000, 3);
  CHECK(est.mean <= 1.0);
  CHECK(est.mean > 0.0);
}

TEST_CASE("overshoot transform basics") {
  auto m = IncrementModel::make("centered_exponential");
  auto one = overshoot_transform(m, 0.2, 0.0, 10.0, 2000, 9);
  CHECK(one.mean == 1.0);
  CHECK(one.std_error == 0.0);
  // overshoot is exactly Exp(1 - theta): E e^{-bR} = (1-theta)/(1-theta+b)
  auto est = overshoot_transform(m, 0.2, 0.3, 20.0, 60000, 11);
  CHECK(std::fabs(est.mean - 0.8 / 1.1) <= 3.0 * est.std_error);
}

TEST_CASE("overshoot transform agrees with the quadrature tier") {
  auto g = IncrementModel::make("gaussian");
  QuadOptions qo;
  qo.tol = 1e-9;
  auto est = overshoot_transform(g, 0.05, 0.1, 50.0, 100000, 17);
  double want = std::exp(rho_direct(g, 0.05, 0.1, qo).value);
  CHECK(std::fabs(est.mean - want) <= 3.0 * est.std_error);
}

TEST_CASE("lindley regenerative mean") {
  auto e = IncrementModel::make("centered_exponential");
  for (double d : {0.2}) {
    auto est = lindley_mean(e, e.conjugate_theta1(d) - d, 20000, 23);
    double want = std::exp(-d) / d;
    CHECK(std::fabs(est.mean - want) <= 3.0 * est.std_error);
  }
  auto g = IncrementModel::make("gaussian");
  auto far = lindley_mean(g, -0.5, 4000, 29);
  CHECK(far.mean > 0.0);
  CHECK(far.mean < 1.5);
  auto mm = mean_max_series(g, 4);
  auto est = lindley_mean(g, g.conjugate_theta1(0.2) - 0.2, 20000, 31);
  CHECK(std::fabs(est.mean - mean_max_eval(mm, 0.2)) <= 3.0 * est.std_error);
}

TEST_CASE("renewal ladder identity") {
  auto e = IncrementModel::make("centered_exponential");
  auto chk = ladder_identity_check(e, 0.2, 0.3, 60000, 5);
  CHECK(chk.z <= 3.0);
  CHECK(std::fabs(chk.lhs.mean - 0.8 / 1.1) <= 4.0 * chk.lhs.std_error);
  CHECK(std::fabs(chk.rhs.mean - 0.8 / 1.1) <= 4.0 * chk.rhs.std_error);
  // b -> 0: both sides approach 1
  auto small = ladder_identity_check(e, 0.2, 1e-4, 4000, 7);
  CHECK(small.lhs.mean == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(small.rhs.mean == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("ladder height mean vs the symmetric-family series") {
  auto g = IncrementModel::make("gaussian");
  auto ls = ladder_series(g, 4);
  auto stats = ladder_stats(g, 0.05, 0.3, 60000, 13);
  CHECK(std::fabs(stats.height_mean.mean - ladder_eval(ls, 0.05)) <=
        3.0 * stats.height_mean.std_error);
}

TEST_CASE("seed determinism is bit-exact") {
  auto m = IncrementModel::make("laplace");
  auto a = overshoot_transform(m, 0.1, 0.2, 30.0, 5000, 123);
  auto b = overshoot_transform(m, 0.1, 0.2, 30.0, 5000, 123);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  auto c = overshoot_transform(m, 0.1, 0.2, 30.0, 5000, 124);
  CHECK(a.mean != c.mean);
  auto l1 = lindley_mean(m, -0.1, 3000, 55);
  auto l2 = lindley_mean(m, -0.1, 3000, 55);
  CHECK(l1.mean == l2.mean);
}

TEST_CASE("preconditions and budget errors") {
  auto m = IncrementModel::make("gaussian");
  CHECK_THROWS_AS(is_crossing_prob(m, 0.1, 5.0, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(overshoot_transform(m, -0.1, 0.1, 10.0, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(lindley_mean(m, 0.1, 100, 1), std::invalid_argument);
  McOptions tight;
  tight.max_steps_per_path = 3;
  CHECK_THROWS_AS(overshoot_transform(m, 0.05, 0.1, 500.0, 10, 1, tight),
                  McBudgetError);
}

TEST_SUITE_END();
