#include <doctest.h>

#include <cmath>
#include <complex>

#include "cda/kernels.hpp"

using namespace cda;
using cd = std::complex<double>;

namespace {

// 1/(1+l^2) as an even kernel with exact Taylor coefficients.
EvenKernel lorentzian(int order = 30) {
  DSeries t(order, "lambda");
  for (int k = 0; k <= order; k += 2) t.set(k, (k / 2) % 2 == 0 ? 1.0 : -1.0);
  return EvenKernel([](double l) { return 1.0 / (1.0 + l * l); }, t, 0.5);
}

// i l / (1 + l^2) = w/(1 - w^2): parity kernel vanishing at 0.
Kernel odd_lorentzian(int order = 52) {
  DSeries t(order, "w");
  for (int k = 1; k <= order; k += 2) t.set(k, 1.0);
  return Kernel([](double l) { return cd(0.0, l) / (1.0 + l * l); }, t, 0.5, true,
                true);
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("T_1 of the Lorentzian is its negative") {
  EvenKernel h = lorentzian();
  EvenKernel t1 = t_even(1, h);
  for (double l : {0.1, 0.7, 2.0, 9.0})
    CHECK(t1(l) == doctest::Approx(-1.0 / (1.0 + l * l)).epsilon(1e-11));
}

TEST_CASE("T semigroup: T1 T1 = T2") {
  EvenKernel h = lorentzian();
  EvenKernel t11 = t_even(1, t_even(1, h));
  EvenKernel t2 = t_even(2, h);
  for (double l : {0.5, 2.0, 10.0}) CHECK(std::fabs(t11(l) - t2(l)) <= 1e-10);
}

TEST_CASE("T~ on a polynomial kernel and its semigroup") {
  DSeries t(12, "w");
  t.set(1, 3.0);
  t.set(2, -2.0);
  Kernel f([](double l) {
    cd w(0.0, l);
    return 3.0 * w - 2.0 * w * w;
  }, t, 0.4, true, true);
  Kernel t1 = t_tilde(1, f);
  CHECK(t1.taylor()[1] == -2.0);
  CHECK(t1.taylor()[0] == 0.0);
  for (double l : {0.1, 1.0, 4.0}) {
    cd w(0.0, l);
    CHECK(std::abs(t1(l) - (-2.0 * w)) < 1e-12);
  }
  auto m = IncrementModel::make("centered_exponential");
  Kernel h1 = h_kernel(m, 1, HVariant::h_tilde);
  Kernel a = t_tilde(1, t_tilde(2, h1));
  Kernel b = t_tilde(3, h1);
  for (double l : {0.5, 2.0, 10.0}) CHECK(std::abs(a(l) - b(l)) <= 1e-10);
  CHECK(a.vanishes_at_zero());
  CHECK(a.parity_tag());
}

TEST_CASE("T~ requires a vanishing kernel and enough Taylor terms") {
  DSeries t(12, "w");
  t.set(0, 1.0);
  Kernel f([](double) { return cd(1.0, 0.0); }, t, 0.4, true, false);
  CHECK_THROWS_AS(t_tilde(1, f), std::invalid_argument);
  DSeries s(6, "w");
  s.set(1, 1.0);
  Kernel g([](double l) { return cd(0.0, l); }, s, 0.4, true, true);
  CHECK_THROWS_AS(t_tilde(2, g), std::invalid_argument);
  CHECK_THROWS_AS(t_even(3, lorentzian(10)), std::invalid_argument);
}

TEST_CASE("h~ kernels vanish at zero for every family") {
  for (const char* name : {"gaussian", "centered_exponential", "laplace",
                           "centered_uniform", "shifted_gamma:shape=4"}) {
    auto m = IncrementModel::make(name);
    for (int k = 1; k <= 5; ++k) {
      Kernel h = h_kernel(m, k, HVariant::h_tilde);
      CHECK(h.taylor()[0] == 0.0);
      CHECK(h.vanishes_at_zero());
      CHECK(h.parity_tag());
      CHECK(h.seam_error() < 1e-9);
    }
  }
}

TEST_CASE("the vanishing shift differs from mu_{k+2} when mu_3 != 0") {
  // h_k(0) = -mu_{k+2} + (2/3) mu_3 mu_{k+1}; for the centered exponential
  // at k = 1 that is -mu_3/3, not -mu_3.
  auto m = IncrementModel::make("centered_exponential");
  Kernel h = h_kernel(m, 1, HVariant::h);
  CHECK(h.taylor()[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  cd near = h(0.01);  // Taylor branch
  CHECK(near.real() == doctest::Approx(-2.0 / 3.0).epsilon(1e-3));
  // numeric branch agrees (evaluate on the numeric side of the seam)
  CHECK(h.numeric_eval(0.3).real() == doctest::Approx(h.taylor_eval(0.3).real()).epsilon(1e-10));
  // symmetric family: shift reduces to mu_{k+2}
  auto g = IncrementModel::make("gaussian");
  Kernel hg = h_kernel(g, 2, HVariant::h);
  CHECK(hg.taylor()[0] == doctest::Approx(-g.raw_moment(4)).epsilon(1e-12));
}

TEST_CASE("gaussian h~1 closed form") {
  auto g = IncrementModel::make("gaussian");
  Kernel h = h_kernel(g, 1, HVariant::h_tilde);
  CHECK(h.taylor()[1] == doctest::Approx(-0.5).epsilon(1e-13));
  double l = 1.0;
  cd want = cd(0.0, l) * std::exp(-0.5 * l * l) / (1.0 - std::exp(-0.5 * l * l)) -
            cd(0.0, 2.0 / l);
  CHECK(std::abs(h(l) - want) < 1e-12);
  CHECK(std::abs(h(50.0)) < 0.05);  // bounded at infinity: -mu_1 + mu_3 = 0
}

TEST_CASE("insufficient moment table is rejected") {
  ModelConfig mc;
  mc.moment_order = 12;
  auto m = IncrementModel::make(DistSpec::parse("gaussian"), mc);
  KernelConfig kc;
  kc.taylor_order = 24;
  CHECK_THROWS_AS(h_kernel(m, 1, HVariant::h_tilde, kc), std::invalid_argument);
}

TEST_CASE("gtilde powers") {
  auto m = IncrementModel::make("centered_exponential");
  GtildePowers g(m, 3, 4);
  Kernel h1 = h_kernel(m, 1, HVariant::h_tilde);
  Kernel g11 = g.coefficient(1, 1);
  for (double l : {0.1, 1.0, 3.0})
    CHECK(std::abs(g11(l) - h1(l)) < 1e-12);  // phi''(0) = W(0) = 1
  // g~_{k,m} = 0 for k < m
  Kernel g12 = g.coefficient(1, 2);
  for (double l : {0.3, 2.0}) CHECK(std::abs(g12(l)) == 0.0);
  // theta^2 of G~^2 is (h~_1)^2
  Kernel g22 = g.coefficient(2, 2);
  for (double l : {0.3, 1.0, 5.0}) {
    cd want = h1(l) * h1(l);
    CHECK(std::abs(g22(l) - want) < 1e-11 * std::max(1.0, std::abs(want)));
  }
  CHECK_THROWS_AS(GtildePowers(m, 5, 4), std::invalid_argument);
}

TEST_CASE("reduced kernels: structure and first kernel") {
  auto m = IncrementModel::make("centered_exponential");
  // deep T~ shifts need the pipeline's taller Taylor branch for a clean seam
  ReducedKernels red = assemble_reduced_kernels(m, 4, KernelConfig{0.25, 48});
  Kernel h1 = h_kernel(m, 1, HVariant::h_tilde, KernelConfig{0.25, 48});
  for (double l : {0.1, 0.8, 4.0})
    CHECK(std::abs(red.at(0, 1)(l) + h1(l)) < 1e-12);  // kernel(0,1) = -h~_1
  for (int mm = 1; mm <= 4; ++mm)
    for (int j = 0; j <= mm - 1; ++j) {
      const Kernel& k = red.at(j, mm);
      CHECK(k.parity_tag());
      CHECK(k.vanishes_at_zero());
      CHECK(k.taylor()[0] == 0.0);
      CHECK(k.seam_error() < 1e-9);
    }
}

TEST_CASE("printed E_{j,m}: offset convention reproduces the reduction") {
  auto m = IncrementModel::make("centered_exponential");
  GtildePowers g(m, 4, 4);
  ReducedKernels red = assemble_reduced_kernels(m, 4);
  for (auto [j, mm] : {std::pair{0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 3}}) {
    Kernel off = e_jm_printed(g, j, mm, EjmConvention::offset);
    for (double l : {0.3, 1.1, 6.0})
      CHECK(std::abs(off(l) - red.at(j, mm)(l)) <
            1e-11 * std::max(1.0, std::abs(off(l))));
  }
  // literal convention drops the theta-power bookkeeping and differs
  Kernel lit = e_jm_printed(g, 0, 2, EjmConvention::literal);
  double dev = 0.0;
  for (double l : {0.3, 1.1, 6.0}) dev = std::max(dev, std::abs(lit(l) - red.at(0, 2)(l)));
  CHECK(dev > 1e-3);
}

TEST_CASE("parity closure on grids") {
  auto m = IncrementModel::make("centered_exponential");
  Kernel h1 = h_kernel(m, 1, HVariant::h_tilde);
  Kernel h2 = h_kernel(m, 2, HVariant::h_tilde);
  Kernel prod = h1 * h2;
  CHECK(prod.parity_tag());
  for (double l : {0.4, 1.3, 7.0}) {
    cd plus = prod(l), minus = prod(-l);
    CHECK(plus.real() == doctest::Approx(minus.real()).epsilon(1e-12));
    CHECK(plus.imag() == doctest::Approx(-minus.imag()).epsilon(1e-12));
    // reciprocals stay in the class
    cd rp = 1.0 / h1(l), rm = 1.0 / h1(-l);
    CHECK(rp.real() == doctest::Approx(rm.real()).epsilon(1e-12));
    CHECK(rp.imag() == doctest::Approx(-rm.imag()).epsilon(1e-12));
  }
}

TEST_CASE("coefficient kernels stay bounded over a wide grid") {
  for (const char* name : {"centered_exponential", "centered_uniform"}) {
    auto m = IncrementModel::make(name);
    ReducedKernels red = assemble_reduced_kernels(m, 3, KernelConfig{0.25, 48});
    for (int mm = 1; mm <= 3; ++mm)
      for (int j = 0; j <= mm - 1; ++j)
        for (double l = 0.05; l < 2.0e3; l *= 2.7) {
          double v = std::abs(red.at(j, mm)(l));
          CHECK(std::isfinite(v));
          CHECK(v < 1e4);
        }
  }
}

TEST_CASE("sup |H~(theta, .)| shrinks with theta") {
  auto m = IncrementModel::make("shifted_gamma:shape=4");
  auto sup_at = [&](double theta) {
    auto h = h_tilde_at(m, theta);
    double s = 0.0;
    for (double l = 0.05; l < 60.0; l *= 1.4) s = std::max(s, std::abs(h.kernel(l)));
    return s;
  };
  double s1 = sup_at(0.1), s2 = sup_at(0.01);
  CHECK(s2 < 0.2 * s1);
  CHECK(s1 < 0.5);
}

TEST_CASE("log kernels: parity, vanishing, seam") {
  for (const char* name : {"gaussian", "centered_exponential"}) {
    auto m = IncrementModel::make(name);
    Kernel s = log_s_kernel(m);
    CHECK(s.vanishes_at_zero());
    CHECK(s.seam_error() < 1e-9);
    Kernel r = log_rho_kernel(m, 0.2);
    CHECK(r.seam_error() < 1e-9);
    Kernel i = log_i_kernel(m, 0.2);
    CHECK(i.seam_error() < 1e-9);
    for (double l : {0.9, 3.0}) {
      cd plus = r(l), minus = r(-l);
      CHECK(plus.real() == doctest::Approx(minus.real()).epsilon(1e-11));
      CHECK(plus.imag() == doctest::Approx(-minus.imag()).epsilon(1e-11));
    }
  }
  auto m = IncrementModel::make("centered_exponential");
  CHECK_THROWS_AS(log_rho_kernel(m, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(log_rho_kernel(m, 0.0), std::invalid_argument);
}

TEST_CASE("odd lorentzian helper sanity") {
  Kernel f = odd_lorentzian();
  CHECK(f.seam_error() < 1e-9);
  EvenKernel fre = re_part(f), fim = im_over_lambda(f);
  CHECK(fre.identically_zero());
  for (double l : {0.2, 1.0, 3.0})
    CHECK(fim(l) == doctest::Approx(1.0 / (1.0 + l * l)).epsilon(1e-11));
}

TEST_SUITE_END();
