#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/kernels.hpp"

namespace cda {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;       // error estimate; <= requested tol on success
  long evals = 0;
  double lambda_max = 0.0;  // where direct panels stop and the 1/lambda tail takes over
};

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& msg, QuadResult partial_)
      : std::runtime_error(msg), partial(partial_) {}
  QuadResult partial;
};

struct ContractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadOptions {
  double tol = 1e-10;
  double split = 50.0;                 // [0, split] direct, beyond via t = 1/lambda
  std::vector<double> breakpoints;     // extra panel boundaries in [0, split]
  long max_evals = 600000;
};

// integral over [0, inf) of f, assuming |f| decays at least like C/lambda^2
// (possibly with logarithmic factors). The tail beyond `split` is integrated
// exactly under t = 1/lambda, so slowly decaying smooth tails cost only a few
// panels; the final sliver near t = 0 enters the error estimate.
QuadResult integrate_halfline(const std::function<double(double)>& f,
                              const QuadOptions& opts = {});

// integral over the whole line of an even integrand (= 2x half line).
QuadResult integrate_line_even(const std::function<double(double)>& f,
                               const QuadOptions& opts = {});

// K(t, h) = (1/2pi) integral of t h(lambda) / (t^2 + lambda^2).
QuadResult k_transform(double t, const EvenKernel& h, const QuadOptions& opts = {});

// J0(b, f) = K(b, Re f(i.)) - b K(b, Im f(i.)/lambda) for parity kernels.
QuadResult j0_transform(double b, const Kernel& f, const QuadOptions& opts = {});

// Numerical residue of the (mathematically zero) imaginary part of J0,
// evaluated without exploiting symmetry. Small iff parity actually holds.
QuadResult j0_imag_residue(double b, const Kernel& f, const QuadOptions& opts = {});

// Direct (non-asymptotic) evaluations of the overing transforms:
//   rho(theta, b) = log E_theta exp(-b R(inf)),  s(b) = rho(0, b),
//   I(theta, b) = rho - s.
QuadResult rho_direct(const IncrementModel& model, double theta, double b,
                      const QuadOptions& opts = {}, const KernelConfig& kcfg = {});
QuadResult s_direct(const IncrementModel& model, double b,
                    const QuadOptions& opts = {}, const KernelConfig& kcfg = {});
QuadResult i_direct(const IncrementModel& model, double theta, double b,
                    const QuadOptions& opts = {}, const KernelConfig& kcfg = {});

}  // namespace cda
