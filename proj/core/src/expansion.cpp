#include "cda/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cda {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

QuadOptions line_opts(const ExpansionConfig& cfg, const EvenKernel& h) {
  QuadOptions o = cfg.quad_options(cfg.quad_tol);
  o.breakpoints.push_back(h.switch_radius());
  return o;
}

// Series of |coefficients|, for first-order error composition.
DSeries abs_series(const DSeries& s) {
  DSeries r(s.order(), s.label());
  for (int k = 0; k <= s.order(); ++k) r.set(k, std::fabs(s[k]));
  return r;
}

}  // namespace

std::vector<ValErr> k_derivatives(const EvenKernel& h, int order,
                                  const ExpansionConfig& cfg) {
  if (order < 0) throw std::invalid_argument("k_derivatives: negative order");
  std::vector<ValErr> out(order + 1);
  if (h.identically_zero()) return out;
  if (h.taylor().order() < order + 2)
    throw std::invalid_argument("k_derivatives: Taylor branch shorter than order + 2");
  for (int n = 0; n <= order; ++n) {
    if (n % 2 == 0) {
      int j = n / 2;
      double sign = (j % 2 == 0) ? 1.0 : -1.0;
      double v = sign * factorial(n) * h.taylor()[n] / 2.0;
      out[n] = {v, 5e-14 * std::fabs(v) + 1e-300};
    } else {
      int j = (n - 1) / 2;
      EvenKernel t = t_even(j + 1, h);
      QuadResult q = integrate_line_even([t](double l) { return t(l); },
                                         line_opts(cfg, h));
      double sign = (j % 2 == 0) ? 1.0 : -1.0;
      double scale = factorial(n) / kTwoPi;
      out[n] = {sign * scale * q.value, scale * q.error};
    }
  }
  return out;
}

std::vector<ValErr> j0_derivatives(const Kernel& f, int order,
                                   const ExpansionConfig& cfg) {
  if (!f.parity_tag() || !f.vanishes_at_zero())
    throw std::invalid_argument("j0_derivatives: kernel must be in P and vanish at 0");
  EvenKernel fre = re_part(f), fim = im_over_lambda(f);
  std::vector<ValErr> kre = k_derivatives(fre, order, cfg);
  std::vector<ValErr> kim =
      order >= 1 ? k_derivatives(fim, order - 1, cfg) : std::vector<ValErr>{};
  std::vector<ValErr> out(order + 1);
  out[0] = kre[0];
  for (int n = 1; n <= order; ++n) {
    out[n].value = kre[n].value - n * kim[n - 1].value;
    out[n].error = kre[n].error + n * kim[n - 1].error;
  }
  return out;
}

std::vector<ValErr> j0_derivatives_printed(const Kernel& f, int order,
                                           const ExpansionConfig& cfg) {
  EvenKernel fre = re_part(f), fim = im_over_lambda(f);
  std::vector<ValErr> out(order + 1);
  for (int n = 0; n <= order; ++n) {
    if (n % 2 == 0) {
      double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
      double fre_n = factorial(n) * fre.taylor()[n];
      EvenKernel t = t_even(n / 2 + 1, fim);
      QuadResult q = integrate_line_even([t](double l) { return t(l); },
                                         line_opts(cfg, fim));
      out[n].value = sign * (fre_n - factorial(n) / kTwoPi * q.value);
      out[n].error = factorial(n) / kTwoPi * q.error;
    } else {
      double sign = (((n + 1) / 2) % 2 == 0) ? 1.0 : -1.0;
      double fim_n1 = factorial(n + 1) * fim.taylor()[n + 1];
      EvenKernel t = t_even((n + 1) / 2, fre);
      QuadResult q = integrate_line_even([t](double l) { return t(l); },
                                         line_opts(cfg, fre));
      out[n].value = sign * (fim_n1 / (n + 1) - factorial(n) / kTwoPi * q.value);
      out[n].error = factorial(n) / kTwoPi * q.error;
    }
  }
  return out;
}

SeriesWithErrors s_series(const IncrementModel& model, int order,
                          const ExpansionConfig& cfg) {
  Kernel L = log_s_kernel(model, cfg.kernel_config());
  EvenKernel lre = re_part(L), lim = im_over_lambda(L);
  std::vector<ValErr> kre = k_derivatives(lre, order, cfg);
  std::vector<ValErr> kim =
      order >= 1 ? k_derivatives(lim, order - 1, cfg) : std::vector<ValErr>{};
  SeriesWithErrors out;
  out.coef = DSeries(order, "b");
  out.error.assign(order + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    double fk = factorial(k);
    double v = kre[k].value / fk;
    double e = kre[k].error / fk;
    if (k >= 1) {
      double fk1 = factorial(k - 1);
      v -= kim[k - 1].value / fk1;
      e += kim[k - 1].error / fk1;
    }
    out.coef.set(k, v);
    out.error[k] = e;
  }
  return out;
}

RhoBiSeries rho_biseries(const IncrementModel& model, int theta_order, int b_order,
                         const ExpansionConfig& cfg) {
  if (theta_order < 1 || b_order < 1)
    throw std::invalid_argument("rho_biseries: orders must be >= 1");
  const KernelConfig kcfg = cfg.kernel_config();
  RhoBiSeries out;
  out.coef = DBiSeries(theta_order, b_order, "theta", "b");
  out.err = DBiSeries(theta_order, b_order, "theta", "b");

  SeriesWithErrors s = s_series(model, b_order, cfg);
  for (int k = 0; k <= b_order; ++k) {
    out.coef.set(0, k, s.coef[k]);
    out.err.set(0, k, s.error[k]);
  }

  ReducedKernels red = assemble_reduced_kernels(model, theta_order, kcfg);
  double seam = 0.0;
  // alpha[m][j][k] = J0^(k)(0, kernel(j, m)) / k!
  std::vector<std::vector<std::vector<ValErr>>> alpha(theta_order + 1);
  for (int m = 1; m <= theta_order; ++m) {
    alpha[m].resize(m);
    for (int j = 0; j <= m - 1; ++j) {
      const Kernel& ker = red.at(j, m);
      seam = std::max(seam, ker.seam_error());
      std::vector<ValErr> jd = j0_derivatives(ker, b_order, cfg);
      alpha[m][j].resize(b_order + 1);
      for (int k = 0; k <= b_order; ++k) {
        double fk = factorial(k);
        alpha[m][j][k] = {jd[k].value / fk, jd[k].error / fk};
      }
    }
  }

  DSeries chi = chi_series(model, theta_order);
  std::vector<DSeries> chipow(theta_order);
  chipow[0] = DSeries::constant(1.0, theta_order, "theta");
  for (int j = 1; j < theta_order; ++j) chipow[j] = chipow[j - 1] * chi;

  for (int a = 1; a <= theta_order; ++a)
    for (int k = 1; k <= b_order; ++k) {
      double v = 0.0, e = 0.0;
      for (int m = 1; m <= a; ++m)
        for (int j = 0; j <= m - 1; ++j) {
          double c = chipow[j][a - m];
          v += c * alpha[m][j][k].value;
          e += std::fabs(c) * alpha[m][j][k].error;
        }
      out.coef.set(a, k, v);
      out.err.set(a, k, e);
    }

  out.diagnostics["kernel_seam_error_max"] = seam;
  if (cfg.compare_printed_j0) {
    // Alternative derivative rule on the first reduced kernel, for the record.
    std::vector<ValErr> norm = j0_derivatives(red.at(0, 1), std::min(3, b_order), cfg);
    std::vector<ValErr> printed =
        j0_derivatives_printed(red.at(0, 1), std::min(3, b_order), cfg);
    double dev = 0.0;
    for (size_t i = 0; i < norm.size(); ++i)
      dev = std::max(dev, std::fabs(norm[i].value - printed[i].value));
    out.diagnostics["printed_j0_max_deviation"] = dev;
  }
  return out;
}

namespace {

// Compose the bivariate table at (theta1(Delta), Delta) together with a
// first-order error bound (abs-coefficient composition).
SeriesWithErrors compose_at_conjugate(const RhoBiSeries& rho, const DSeries& theta1,
                                      int order) {
  DSeries b = DSeries::identity(order, "Delta");
  SeriesWithErrors out;
  out.coef = rho.coef.compose_both(theta1.truncated(order).with_label("Delta"), b, order);
  DBiSeries abs_err(rho.err.x_order(), rho.err.y_order(), "theta", "b");
  for (int j = 0; j <= rho.err.x_order(); ++j)
    for (int k = 0; k <= rho.err.y_order(); ++k)
      abs_err.set(j, k, std::fabs(rho.err.at(j, k)));
  DSeries errc = abs_err.compose_both(
      abs_series(theta1.truncated(order)).with_label("Delta"), b, order);
  out.error.assign(order + 1, 0.0);
  for (int n = 0; n <= order; ++n) out.error[n] = errc[n];
  return out;
}

}  // namespace

ExpansionReport beta_series(const IncrementModel& model, int order,
                            const ExpansionConfig& cfg) {
  if (order < 1) throw std::invalid_argument("beta_series: order must be >= 1");
  RhoBiSeries rho = rho_biseries(model, order, order, cfg);
  DSeries theta1 = model.theta1_series(order);
  SeriesWithErrors r = compose_at_conjugate(rho, theta1, order);
  ExpansionReport rep;
  rep.kind = "beta";
  rep.model = model.name();
  rep.order = order;
  rep.config = cfg;
  rep.coefficients.assign(order + 1, 0.0);
  rep.error_bounds = r.error;
  for (int n = 0; n <= order; ++n) rep.coefficients[n] = r.coef[n];
  rep.diagnostics = rho.diagnostics;
  rep.diagnostics["beta1_first_order"] = -r.coef[std::min(1, order)];
  return rep;
}

CumulantTable kappa_table(const IncrementModel& model, int n_max, int j_max,
                          const ExpansionConfig& cfg) {
  if (n_max < 1 || j_max < 0) throw std::invalid_argument("kappa_table: bad orders");
  RhoBiSeries rho = rho_biseries(model, std::max(j_max, 1), n_max, cfg);
  CumulantTable t;
  t.n_max = n_max;
  t.j_max = j_max;
  t.v.assign(n_max, std::vector<ValErr>(j_max + 1));
  for (int n = 1; n <= n_max; ++n)
    for (int j = 0; j <= j_max; ++j) {
      double scale = ((n % 2 == 0) ? 1.0 : -1.0) * factorial(n) * factorial(j);
      t.v[n - 1][j] = {scale * rho.coef.at(j, n), factorial(n) * factorial(j) *
                                                      rho.err.at(j, n)};
    }
  return t;
}

ExpansionReport mean_max_series(const IncrementModel& model, int order,
                                const ExpansionConfig& cfg) {
  if (order < 0) throw std::invalid_argument("mean_max_series: order must be >= 0");
  int nt = std::max(order, 1);
  RhoBiSeries rho = rho_biseries(model, nt, order + 1, cfg);
  RhoBiSeries drho;
  drho.coef = rho.coef.d_y();
  drho.err = rho.err.d_y();  // compose_at_conjugate takes magnitudes
  DSeries theta1 = model.theta1_series(std::max(order, 1));
  SeriesWithErrors mm = compose_at_conjugate(drho, theta1, order);
  ExpansionReport rep;
  rep.kind = "mean_max";
  rep.model = model.name();
  rep.order = order;
  rep.config = cfg;
  rep.coefficients.assign(order + 1, 0.0);
  rep.error_bounds.assign(order + 1, 0.0);
  for (int n = 0; n <= order; ++n) {
    rep.coefficients[n] = mm.coef[n];
    rep.error_bounds[n] = std::fabs(mm.error[n]);
  }
  rep.diagnostics = rho.diagnostics;
  rep.diagnostics["leading_inv_delta_coefficient"] = 1.0;  // exact
  return rep;
}

double mean_max_eval(const ExpansionReport& mm, double delta) {
  double acc = 1.0 / delta;
  double dp = 1.0;
  for (int n = 0; n <= mm.order; ++n) {
    acc += mm.coefficients[n] * dp;
    dp *= delta;
  }
  return acc;
}

ExpansionReport ladder_series(const IncrementModel& model, int order,
                              const ExpansionConfig& cfg) {
  if (!model.symmetric())
    throw std::invalid_argument(
        "ladder_series: symmetric families only (laplace, gaussian, centered_uniform)");
  if (order < 1) throw std::invalid_argument("ladder_series: order must be >= 1");
  ExpansionReport beta = beta_series(model, order, cfg);

  // sqrt(psi'(theta1)/(2 theta1)): psi'/(2 theta) has coefficients
  // kappa_{k+2} / (2 (k+1)!), constant 1/2.
  DSeries two_u(order, "theta1");
  double fac = 1.0;
  for (int k = 0; k <= order; ++k) {
    fac *= (k + 1);
    if (k + 2 <= model.moment_order()) two_u.set(k, model.cumulant(k + 2) / fac);
  }
  DSeries root = two_u.sqrt().scaled(1.0 / std::sqrt(2.0));

  DSeries arg(order, "theta1");
  for (int n = 1; n <= order; n += 2)
    arg.set(n, -0.5 * std::pow(2.0, n) * beta.coefficients[n]);
  DSeries prod = root * arg.exp();

  ExpansionReport rep;
  rep.kind = "ladder";
  rep.model = model.name();
  rep.order = order;
  rep.config = cfg;
  rep.coefficients.assign(order + 1, 0.0);
  rep.error_bounds.assign(order + 1, 0.0);
  for (int n = 0; n <= order; ++n) rep.coefficients[n] = prod[n];
  for (int k = 0; k <= order; ++k) {
    double e = 0.0;
    for (int n = 1; n <= k; n += 2)
      e += 0.5 * std::pow(2.0, n) * beta.error_bounds[n] * std::fabs(prod[k - n]);
    rep.error_bounds[k] = e;
  }
  rep.diagnostics = beta.diagnostics;
  return rep;
}

double ladder_eval(const ExpansionReport& ls, double theta1) {
  double acc = 0.0, tp = 1.0;
  for (int n = 0; n <= ls.order; ++n) {
    acc += ls.coefficients[n] * tp;
    tp *= theta1;
  }
  return acc;
}

TailApprox tail_approx(const IncrementModel& model, const DriftSpec& drift, double x,
                       int order, const ExpansionConfig& cfg) {
  if (!(x > 0.0)) throw std::invalid_argument("tail_approx: need x > 0");
  TailApprox t;
  t.x = x;
  t.order = order;
  switch (drift.kind) {
    case DriftKind::delta:
      if (!(drift.value > 0.0)) throw std::invalid_argument("tail_approx: need Delta > 0");
      t.delta = drift.value;
      t.theta1 = model.conjugate_theta1(t.delta);
      t.theta0 = t.theta1 - t.delta;
      break;
    case DriftKind::theta0:
      t.theta0 = drift.value;
      t.theta1 = model.theta1_of_theta0(t.theta0);
      t.delta = t.theta1 - t.theta0;
      break;
    case DriftKind::mu:
      t.theta0 = model.theta0_from_drift(drift.value);
      t.theta1 = model.theta1_of_theta0(t.theta0);
      t.delta = t.theta1 - t.theta0;
      break;
  }
  t.mu = -model.psi1(t.theta0);
  t.sigma2 = model.psi2(t.theta0);
  ExpansionReport beta = beta_series(model, order, cfg);
  t.r = beta.coefficients;
  t.r_err = beta.error_bounds;
  t.diffusion = std::exp(-2.0 * t.mu * x / t.sigma2);
  t.corrected_order1 = std::exp(-t.delta * x + t.r[1] * t.delta);
  double acc = 0.0, dp = 1.0;
  for (int n = 1; n <= order; ++n) {
    dp *= t.delta;
    acc += t.r[n] * dp;
  }
  t.corrected_orderN = std::exp(-t.delta * x + acc);
  t.delta_max = validated_delta_max(model, cfg);
  t.radius_warning = t.delta > t.delta_max;
  return t;
}

double validated_delta_max(const IncrementModel& model, const ExpansionConfig& cfg) {
  const KernelConfig kcfg = cfg.kernel_config();
  double dmax = 0.0;
  for (double d = 0.05; d <= 0.601; d += 0.05) {
    if (d >= 0.9 * 2.0 * model.eta()) break;
    double th1;
    try {
      th1 = model.conjugate_theta1(d);
    } catch (const std::exception&) {
      break;
    }
    if (!(th1 < 0.5 * model.eta())) break;
    double sup;
    try {
      sup = contraction_sup(model, th1, kcfg);
    } catch (const std::exception&) {
      break;
    }
    if (sup < 0.98)
      dmax = d;
    else
      break;
  }
  return dmax;
}

}  // namespace cda
