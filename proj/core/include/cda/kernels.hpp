#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "cda/increments.hpp"
#include "cda/pseries.hpp"

namespace cda {

// Functions of lambda presented as f(i lambda), with a hybrid evaluation:
// a Taylor branch in w = i*lambda inside |lambda| < switch_radius (where the
// defining formulas cancel catastrophically) and the closed-form numeric
// branch outside. Taylor coefficients are real; that encodes the parity
// property (Re f(i.) even, Im f(i.) odd) structurally.

struct KernelConfig {
  double lambda0 = 0.25;  // switch radius
  int taylor_order = 24;  // Taylor order M in w = i*lambda
};

class Kernel {
 public:
  using Numeric = std::function<std::complex<double>(double)>;

  Kernel() = default;
  Kernel(Numeric numeric, DSeries wtaylor, double switch_radius,
         bool parity, bool vanishes);

  std::complex<double> operator()(double lambda) const;
  std::complex<double> taylor_eval(double lambda) const;
  std::complex<double> numeric_eval(double lambda) const;

  const DSeries& taylor() const;
  double switch_radius() const;
  bool parity_tag() const;
  bool vanishes_at_zero() const;

  // Max relative mismatch between branches at {0.8, 1.0, 1.25} * switch radius.
  double seam_error() const;

  Kernel scaled(double s) const;
  friend Kernel operator*(const Kernel& a, const Kernel& b);
  friend Kernel operator+(const Kernel& a, const Kernel& b);
  static Kernel linear_combination(const std::vector<std::pair<double, Kernel>>& terms);

 private:
  struct Data {
    Numeric numeric;
    DSeries wtaylor;
    double r0 = 0.25;
    bool parity = false;
    bool vanishes = false;
  };
  std::shared_ptr<const Data> d_;
};

// Real even function of lambda with the same hybrid scheme (Taylor in lambda,
// even coefficients only). These are the integrands' building blocks.
class EvenKernel {
 public:
  using Numeric = std::function<double(double)>;

  EvenKernel() = default;
  EvenKernel(Numeric numeric, DSeries ltaylor, double switch_radius);

  double operator()(double lambda) const;
  double taylor_eval(double lambda) const;
  const DSeries& taylor() const;
  double switch_radius() const;
  bool identically_zero() const;
  double seam_error() const;

 private:
  struct Data {
    Numeric numeric;
    DSeries ltaylor;
    double r0 = 0.25;
    bool zero = false;
  };
  std::shared_ptr<const Data> d_;
};

// Re f(i.) and Im f(i.)/lambda of a parity kernel, as even real kernels.
EvenKernel re_part(const Kernel& f);
EvenKernel im_over_lambda(const Kernel& f);

// T_j on even real functions: subtract the Taylor polynomial through
// lambda^{2j-2} and divide by lambda^{2j}. T_0 is the identity.
EvenKernel t_even(int j, const EvenKernel& h);

// T~_j on kernels vanishing at 0: subtract Taylor terms m = 1..j of f(i.)
// and divide by (i lambda)^j. Preserves parity and vanishing.
Kernel t_tilde(int j, const Kernel& f);

enum class HVariant { h, h_tilde };

// The expansion kernels of the MGF ratio:
//   h_k(i l) = (gamma^(k)(i l) - mu_k)/(1 - g(l)) - 2 i mu_{k+1}/l.
// The h_tilde variant is h_k shifted by -h_k(0) so that it vanishes at 0.
// (As lambda -> 0, h_k -> -mu_{k+2} + (2/3) mu_3 mu_{k+1}; the mu_3 cross
// term comes from the cubic term of 1 - g in the denominator, so for
// asymmetric increments the shift differs from the symmetric-case mu_{k+2}.)
Kernel h_kernel(const IncrementModel& model, int k, HVariant variant,
                const KernelConfig& cfg = {});

// W(theta) = 1 - H(theta, 0) as a theta-series; equals
// phi''(theta) - (2 mu_3 / 3) phi'(theta). Normalizes G~ = H~ / W.
DSeries w_series(const IncrementModel& model, int order);
// chi(theta) = -Psi(theta)/theta with Psi = 2 phi'/W; chi(0) = -2.
DSeries chi_series(const IncrementModel& model, int order);

// G~(theta, lambda)^p expanded in theta: coefficient(k, p) is the kernel
// multiplying theta^k in G~^p (zero for k < p). Shares one evaluation core
// across all coefficients.
class GtildePowers {
 public:
  GtildePowers(const IncrementModel& model, int p_max, int theta_order,
               const KernelConfig& cfg = {});

  int theta_order() const { return order_; }
  int p_max() const { return pmax_; }
  Kernel coefficient(int k, int p) const;  // theta^k of G~^p

 private:
  struct Core;
  std::shared_ptr<const Core> core_;
  int order_, pmax_;
};

// The reduced kernels of the I-expansion:
//   I(theta, b) = sum_{m=1..N} theta^m sum_{j=0..m-1} chi(theta)^j
//                 J0(b, kernel(j, m)) + b o(theta^N),
// with kernel(j,m) = -sum_{p=1..m-j} (C(p+j-1, j)/p) T~_j g~_{m-j, p}.
struct ReducedKernels {
  int order = 0;
  // kernels[m-1][j] for 1 <= m <= N, 0 <= j <= m-1
  std::vector<std::vector<Kernel>> kernels;
  const Kernel& at(int j, int m) const { return kernels.at(m - 1).at(j); }
};
ReducedKernels assemble_reduced_kernels(const IncrementModel& model, int theta_order,
                                        const KernelConfig& cfg = {});

// Closed-form assembly of the reduced kernels from binomial-weighted
// T~_j g~ terms, kept as a cross-check. Two index conventions circulate:
// "offset" reads g~_{k,p} as the coefficient of theta^{k+p} (and reproduces
// assemble_reduced_kernels), "literal" reads it as the coefficient of
// theta^k (and does not).
enum class EjmConvention { offset, literal };
Kernel e_jm_printed(const GtildePowers& g, int j, int m, EjmConvention conv);

// Integrand kernels for the direct-quadrature tier.
// log(2 (1 - g(l)) / l^2): the s(b) integrand of the zero-drift overshoot.
Kernel log_s_kernel(const IncrementModel& model, const KernelConfig& cfg = {});
// log(2 (gamma(t) - gamma(t+il)) / (l (l - 2 i phi'(t)))), theta in (0, eta/2).
Kernel log_rho_kernel(const IncrementModel& model, double theta,
                      const KernelConfig& cfg = {});

// H~(theta, .) = H(theta, .) - H(theta, 0) at fixed theta, plus the scalars
// W(theta) and Psi(theta) = 2 phi'(theta)/W(theta) used with it.
struct HTildeAt {
  Kernel kernel;
  double w = 1.0;    // W(theta)
  double psi = 0.0;  // Psi(theta)
  double phi1 = 0.0;
};
HTildeAt h_tilde_at(const IncrementModel& model, double theta,
                    const KernelConfig& cfg = {});

// log(1 - v(theta, .)) with v = W^{-1} l H~ / (l - i Psi): the I integrand.
Kernel log_i_kernel(const IncrementModel& model, double theta,
                    const KernelConfig& cfg = {});

// sup over a lambda grid of |v(theta, lambda)|; the log expansion above is
// valid while this stays below 1.
double contraction_sup(const IncrementModel& model, double theta,
                       const KernelConfig& cfg = {});

}  // namespace cda
