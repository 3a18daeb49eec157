#pragma once

#include <map>
#include <string>
#include <vector>

#include "cda/quadrature.hpp"

namespace cda {

struct ValErr {
  double value = 0.0;
  double error = 0.0;
};

struct ExpansionConfig {
  int theta_order = 6;     // bivariate theta order
  int b_order = 6;         // bivariate b order
  double quad_tol = 1e-10; // coefficient-tier quadrature tolerance
  double direct_tol = 1e-8;
  double lambda0 = 0.25;
  int taylor_order = 48;   // kernel Taylor order for the pipeline (deep shifts)
  double split = 50.0;
  long max_evals = 600000;
  bool compare_printed_j0 = false;

  KernelConfig kernel_config() const { return KernelConfig{lambda0, taylor_order}; }
  QuadOptions quad_options(double tol) const {
    QuadOptions o;
    o.tol = tol;
    o.split = split;
    o.max_evals = max_evals;
    return o;
  }
};

struct ExpansionReport {
  std::string kind;
  std::string model;
  int order = 0;
  std::vector<double> coefficients;  // index = power, 0..order
  std::vector<double> error_bounds;
  std::map<std::string, double> diagnostics;
  ExpansionConfig config;
};

// Short-time derivatives K^(n)(0, h) of the Cauchy transform of an even real
// kernel: even orders read off the Taylor branch, odd orders integrate
// T_{j+1} h over the line.
std::vector<ValErr> k_derivatives(const EvenKernel& h, int order,
                                  const ExpansionConfig& cfg = {});

// J0^(n)(0, f) for parity kernels vanishing at zero, via the kernel split
// J0(b, f) = K(b, Re f(i.)) - b K(b, Im f(i.)/lambda).
std::vector<ValErr> j0_derivatives(const Kernel& f, int order,
                                   const ExpansionConfig& cfg = {});
// An alternative derivative rule kept for comparison; the closed-form
// integrals decide against it.
std::vector<ValErr> j0_derivatives_printed(const Kernel& f, int order,
                                           const ExpansionConfig& cfg = {});

struct SeriesWithErrors {
  DSeries coef;
  std::vector<double> error;
};

// Taylor coefficients of s(b) = log E_0 exp(-b R(inf)) at b = 0.
SeriesWithErrors s_series(const IncrementModel& model, int order,
                          const ExpansionConfig& cfg = {});

struct RhoBiSeries {
  DBiSeries coef;  // [theta^j b^k] rho
  DBiSeries err;
  std::map<std::string, double> diagnostics;
};
RhoBiSeries rho_biseries(const IncrementModel& model, int theta_order, int b_order,
                         const ExpansionConfig& cfg = {});

// r_n = [Delta^n] log E_{theta1} exp(-Delta R(inf)); coefficients[0] = 0.
// diagnostics also expose beta1 = -r_1, the sign convention that writes the
// first-order correction as exp(-beta1 Delta).
ExpansionReport beta_series(const IncrementModel& model, int order,
                            const ExpansionConfig& cfg = {});

struct CumulantTable {
  int n_max = 0, j_max = 0;
  std::vector<std::vector<ValErr>> v;  // v[n][j], 1 <= n <= n_max, 0 <= j <= j_max
  const ValErr& at(int n, int j) const { return v.at(n - 1).at(j); }
};
CumulantTable kappa_table(const IncrementModel& model, int n_max, int j_max,
                          const ExpansionConfig& cfg = {});

// E_{theta0} M = 1/Delta + c_0 + c_1 Delta + ...; coefficients are the c_n.
// The 1/Delta coefficient is exactly 1 (rational bookkeeping, no quadrature).
ExpansionReport mean_max_series(const IncrementModel& model, int order,
                                const ExpansionConfig& cfg = {});
double mean_max_eval(const ExpansionReport& mm, double delta);

// E_{theta1} S_{tau+} as a series in theta1, symmetric families only:
// sqrt(psi'(theta1)/(2 theta1)) exp(-(1/2) sum_{odd n} r_n (2 theta1)^n).
ExpansionReport ladder_series(const IncrementModel& model, int order,
                              const ExpansionConfig& cfg = {});
double ladder_eval(const ExpansionReport& ls, double theta1);

enum class DriftKind { delta, theta0, mu };
struct DriftSpec {
  DriftKind kind = DriftKind::delta;
  double value = 0.0;
};

struct TailApprox {
  double delta = 0, theta0 = 0, theta1 = 0, mu = 0, sigma2 = 1, x = 0;
  double diffusion = 0;         // exp(-2 mu x / sigma^2)
  double corrected_order1 = 0;  // exp(-Delta x + r_1 Delta)
  double corrected_orderN = 0;  // exp(-Delta x + sum r_n Delta^n)
  int order = 0;
  std::vector<double> r, r_err;
  bool radius_warning = false;
  double delta_max = 0;
};
TailApprox tail_approx(const IncrementModel& model, const DriftSpec& drift, double x,
                       int order, const ExpansionConfig& cfg = {});

// Largest grid Delta for which the log expansion's contraction holds.
double validated_delta_max(const IncrementModel& model, const ExpansionConfig& cfg = {});

}  // namespace cda
