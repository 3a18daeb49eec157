#include <doctest.h>

#include <cmath>
#include <complex>

#include "cda/increments.hpp"
#include "test_util.hpp"

using namespace cda;
using cd = std::complex<double>;

namespace {

const char* kFamilies[] = {"gaussian", "centered_exponential", "laplace",
                           "centered_uniform", "shifted_gamma:shape=4"};

}  // namespace

TEST_SUITE_BEGIN("increments");

TEST_CASE("gaussian basics") {
  auto m = IncrementModel::make("gaussian");
  CHECK(m.cumulant(3) == 0.0);
  CHECK(m.cumulant(4) == 0.0);
  for (double l : {0.3, 1.7}) {
    cd z(0.0, l);
    CHECK(std::abs(m.mgf(0, z) - std::exp(0.5 * z * z)) < 1e-14);
    CHECK(std::abs(m.mgf(1, z) - z * std::exp(0.5 * z * z)) < 1e-14);
  }
}

TEST_CASE("centered exponential cumulants match finite differences of log gamma") {
  auto m = IncrementModel::make("centered_exponential");
  for (int n = 2; n <= 6; ++n)
    CHECK(m.cumulant(n) == doctest::Approx(std::tgamma(double(n))));
  CHECK(m.psi(0.3) == doctest::Approx(-0.3 - std::log1p(-0.3)).epsilon(1e-14));
  // kappa_3 from a five-point central difference of psi = log gamma.
  auto psi = [&](double t) { return std::log(m.mgf(0, cd(t, 0.0)).real()); };
  double h = 1e-2;
  double k3 = (psi(2 * h) - 2 * psi(h) + 2 * psi(-h) - psi(-2 * h)) / (2 * h * h * h);
  CHECK(k3 == doctest::Approx(2.0).epsilon(1e-3));  // FD truncation is O(h^2)
}

TEST_CASE("laplace standardized moments, with a density-integration oracle") {
  auto m = IncrementModel::make("laplace");
  CHECK(m.raw_moment(3) == 0.0);
  CHECK(m.raw_moment(4) == doctest::Approx(6.0).epsilon(1e-14));
  const double b = 1.0 / std::sqrt(2.0);
  auto dens4 = [&](double x) {
    return 2.0 * x * x * x * x * std::exp(-x / b) / (2.0 * b);
  };
  double mu4 = testutil::adaptive_simpson(dens4, 0.0, 40.0 * b, 1e-10);
  CHECK(mu4 == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("mgf against a numeric integral, centered exponential") {
  auto m = IncrementModel::make("centered_exponential");
  double theta = 0.4;
  auto f = [&](double x) { return std::exp(theta * x) * std::exp(-(x + 1.0)); };
  double want = testutil::adaptive_simpson(f, -1.0, 80.0, 1e-12);
  CHECK(m.mgf(0, cd(theta, 0.0)).real() == doctest::Approx(want).epsilon(1e-9));
  CHECK(m.mgf(0, cd(theta, 0.0)).real() ==
        doctest::Approx(std::exp(-theta) / (1.0 - theta)).epsilon(1e-14));
}

TEST_CASE("mgf derivative consistency across families") {
  for (const char* name : kFamilies) {
    auto m = IncrementModel::make(name);
    cd z(0.2, 0.9);
    double h = 1e-5;
    for (int k = 1; k <= 4; ++k) {
      cd fd = (m.mgf(k - 1, z + h) - m.mgf(k - 1, z - h)) / (2.0 * h);
      cd an = m.mgf(k, z);
      CHECK(std::abs(fd - an) / std::max(1.0, std::abs(an)) < 1e-6);
    }
    CHECK_THROWS_AS(m.mgf(0, cd(m.eta() * 1.01, 0.0)), std::invalid_argument);
  }
}

TEST_CASE("moment and cumulant tables satisfy the Bell relation") {
  for (const char* name : kFamilies) {
    auto m = IncrementModel::make(name);
    CHECK(m.raw_moment(1) == 0.0);
    CHECK(m.raw_moment(2) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> mu(m.moments().begin(), m.moments().begin() + 13);
    auto kap = cumulants_from_moments(mu);
    auto mu2 = moments_from_cumulants(kap);
    for (int n = 1; n <= 12; ++n) {
      double scale = std::max(1.0, std::fabs(m.raw_moment(n)));
      CHECK(std::fabs(kap[n] - m.cumulant(n)) / std::max(1.0, std::fabs(m.cumulant(n))) <
            1e-12);
      CHECK(std::fabs(mu2[n] - mu[n]) / scale < 1e-12);
    }
  }
}

TEST_CASE("nonlattice gate and rejection paths") {
  for (const char* name : kFamilies) {
    auto m = IncrementModel::make(name);
    CHECK(m.nonlattice_gate_min() > 1e-7);
  }
  CHECK_THROWS_AS(IncrementModel::make("bernoulli"), ModelError);
  CHECK_THROWS_AS(IncrementModel::make("shifted_gamma:shape=0.5"), ModelError);
  CHECK_THROWS_AS(IncrementModel::make("shifted_gamma"), ModelError);
}

TEST_CASE("conjugate root examples") {
  auto g = IncrementModel::make("gaussian");
  CHECK(g.conjugate_theta1(0.2) == doctest::Approx(0.1).epsilon(1e-12));
  auto e = IncrementModel::make("centered_exponential");
  for (double d : {0.05, 0.1, 0.2, 0.4}) {
    double closed = 1.0 - d / std::expm1(d);
    double th1 = e.conjugate_theta1(d);
    CHECK(th1 == doctest::Approx(closed).epsilon(1e-12));
    CHECK(std::fabs(e.psi(th1) - e.psi(th1 - d)) < 1e-14);
    CHECK(e.psi1(th1) > 0.0);
    CHECK(e.psi1(th1 - d) < 0.0);
  }
  CHECK(e.conjugate_theta1(0.1) ==
        doctest::Approx(0.05 - 0.01 / 12.0).epsilon(2e-5));
  CHECK_THROWS_AS(e.conjugate_theta1(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(e.conjugate_theta1(5.0), std::invalid_argument);
}

TEST_CASE("theta0 from drift and back") {
  for (const char* name : kFamilies) {
    auto m = IncrementModel::make(name);
    double th0 = m.theta0_from_drift(0.07);
    CHECK(th0 < 0.0);
    CHECK(m.psi1(th0) == doctest::Approx(-0.07).epsilon(1e-10));
    double th1 = m.theta1_of_theta0(th0);
    CHECK(th1 > 0.0);
    CHECK(std::fabs(m.psi(th1) - m.psi(th0)) < 1e-13);
  }
}

TEST_CASE("theta1 series examples") {
  auto g = IncrementModel::make("gaussian");
  auto tg = g.theta1_series(5);
  CHECK(tg[1] == doctest::Approx(0.5).epsilon(1e-14));
  for (int k = 2; k <= 5; ++k) CHECK(std::fabs(tg[k]) < 1e-13);

  for (const char* name : {"centered_exponential", "shifted_gamma:shape=4"}) {
    auto m = IncrementModel::make(name);
    auto t = m.theta1_series(2);
    CHECK(t[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(t[2] == doctest::Approx(-m.cumulant(3) / 24.0).epsilon(1e-12));
  }

  auto e = IncrementModel::make("centered_exponential");
  auto te = e.theta1_series(3);
  CHECK(te[2] == doctest::Approx(-1.0 / 12.0).epsilon(1e-13));
  CHECK(std::fabs(te[3]) < 1e-13);
}

TEST_CASE("theta1 series converges to the numeric root at the expected rate") {
  for (const char* name : kFamilies) {
    auto m = IncrementModel::make(name);
    const int N = 4;
    auto t = m.theta1_series(N);
    // symmetric families have theta1 = Delta/2 exactly; slopes are only
    // measurable while the errors sit above rounding noise
    double prev = 0.0;
    double worst_slope = 100.0;
    for (double d : {0.1, 0.05, 0.025}) {
      double err = std::fabs(t.eval(d) - m.conjugate_theta1(d));
      if (prev > 1e-13 && err > 1e-13)
        worst_slope = std::min(worst_slope, std::log2(prev / err));
      prev = err;
    }
    CHECK(worst_slope >= N + 0.5);
  }
}

TEST_CASE("psi convexity on a strip grid") {
  for (const char* name : kFamilies) {
    auto m = IncrementModel::make(name);
    double lo = -0.8 * m.eta(), hi = 0.8 * m.eta();
    int n = 40;
    for (int i = 1; i + 1 < n; ++i) {
      double h = (hi - lo) / n;
      double t = lo + i * h;
      double dd = m.psi(t + h) - 2.0 * m.psi(t) + m.psi(t - h);
      CHECK(dd > 0.0);
    }
  }
}

TEST_CASE("tilted samplers hit psi'(theta) within 4 standard errors") {
  for (const char* name : kFamilies) {
    auto m = IncrementModel::make(name);
    for (double frac : {0.0, 0.35}) {
      double theta = frac * std::min(m.eta(), 1.0);
      auto xs = sample_tilted(m, theta, 2024, 1000000);
      double s = 0.0, s2 = 0.0;
      for (double v : xs) {
        s += v;
        s2 += v * v;
      }
      double mean = s / xs.size();
      double var = s2 / xs.size() - mean * mean;
      double se = std::sqrt(var / xs.size());
      CHECK(std::fabs(mean - m.psi1(theta)) < 4.0 * se);
      if (theta == 0.0) CHECK(std::fabs(var - 1.0) < 0.02);
    }
  }
  auto m = IncrementModel::make("centered_exponential");
  CHECK_THROWS_AS(sample_tilted(m, 1.5, 1, 10), std::invalid_argument);
}

TEST_CASE("tilted sampling is deterministic per seed") {
  auto m = IncrementModel::make("shifted_gamma:shape=4");
  auto a = sample_tilted(m, 0.3, 777, 500);
  auto b = sample_tilted(m, 0.3, 777, 500);
  auto c = sample_tilted(m, 0.3, 778, 500);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_SUITE_END();
