#include "cda/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cda {

namespace {

using cd = std::complex<double>;

cd wpow(double lambda, int n) {
  cd w(0.0, lambda);
  cd r = 1.0;
  for (int i = 0; i < n; ++i) r *= w;
  return r;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double rel_diff(cd a, cd b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-30});
  return std::abs(a - b) / scale;
}

// Shrink a candidate switch radius until the Taylor and numeric branches
// agree there; the nearest singularity of a log kernel is data dependent
// (conjugate points, contraction boundary), so the seam check is the
// authority.
double tune_radius(const Kernel::Numeric& numeric, const DSeries& taylor,
                   double r0) {
  auto taylor_eval = [&taylor](double lam) {
    cd w(0.0, lam), acc(0.0, 0.0);
    for (int k = taylor.order(); k >= 0; --k) acc = acc * w + taylor[k];
    return acc;
  };
  for (int it = 0; it < 14 && r0 > 1e-3; ++it) {
    double worst = 0.0;
    for (double f : {0.8, 1.0, 1.25})
      worst = std::max(worst, rel_diff(taylor_eval(f * r0), numeric(f * r0)));
    if (worst < 1e-10) break;
    r0 *= 0.75;
  }
  return r0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(Numeric numeric, DSeries wtaylor, double switch_radius,
               bool parity, bool vanishes) {
  auto d = std::make_shared<Data>();
  d->numeric = std::move(numeric);
  d->wtaylor = std::move(wtaylor);
  d->r0 = switch_radius;
  d->parity = parity;
  d->vanishes = vanishes;
  if (d->vanishes && d->wtaylor[0] != 0.0)
    throw std::invalid_argument("Kernel: vanishes-at-0 tag but nonzero constant coefficient");
  d_ = std::move(d);
}

std::complex<double> Kernel::taylor_eval(double lambda) const {
  const auto& c = d_->wtaylor.coeffs();
  cd w(0.0, lambda), acc(0.0, 0.0);
  for (int k = int(c.size()) - 1; k >= 0; --k) acc = acc * w + c[k];
  return acc;
}

std::complex<double> Kernel::numeric_eval(double lambda) const {
  return d_->numeric(lambda);
}

std::complex<double> Kernel::operator()(double lambda) const {
  if (std::fabs(lambda) < d_->r0) return taylor_eval(lambda);
  return d_->numeric(lambda);
}

const DSeries& Kernel::taylor() const { return d_->wtaylor; }
double Kernel::switch_radius() const { return d_->r0; }
bool Kernel::parity_tag() const { return d_->parity; }
bool Kernel::vanishes_at_zero() const { return d_->vanishes; }

double Kernel::seam_error() const {
  double worst = 0.0;
  for (double f : {0.8, 1.0, 1.25}) {
    double lam = f * d_->r0;
    worst = std::max(worst, rel_diff(taylor_eval(lam), numeric_eval(lam)));
  }
  return worst;
}

Kernel Kernel::scaled(double s) const {
  return linear_combination({{s, *this}});
}

Kernel operator*(const Kernel& a, const Kernel& b) {
  auto da = a, db = b;
  DSeries t = a.taylor() * b.taylor();
  double r0 = std::min(a.switch_radius(), b.switch_radius());
  bool parity = a.parity_tag() && b.parity_tag();
  bool vanishes = a.vanishes_at_zero() || b.vanishes_at_zero();
  return Kernel([da, db](double l) { return da(l) * db(l); }, std::move(t), r0,
                parity, vanishes);
}

Kernel operator+(const Kernel& a, const Kernel& b) {
  return Kernel::linear_combination({{1.0, a}, {1.0, b}});
}

Kernel Kernel::linear_combination(const std::vector<std::pair<double, Kernel>>& terms) {
  if (terms.empty()) throw std::invalid_argument("Kernel: empty linear combination");
  int order = terms.front().second.taylor().order();
  double r0 = terms.front().second.switch_radius();
  bool parity = true, vanishes = true;
  for (const auto& [c, k] : terms) {
    order = std::min(order, k.taylor().order());
    r0 = std::min(r0, k.switch_radius());
    parity = parity && k.parity_tag();
    vanishes = vanishes && k.vanishes_at_zero();
  }
  DSeries t(order, "w");
  for (const auto& [c, k] : terms)
    for (int i = 0; i <= order; ++i) t.set(i, t[i] + c * k.taylor()[i]);
  auto copy = terms;
  return Kernel(
      [copy](double l) {
        cd acc = 0.0;
        for (const auto& [c, k] : copy) acc += c * k(l);
        return acc;
      },
      std::move(t), r0, parity, vanishes);
}

// ---------------------------------------------------------------------------
// EvenKernel

EvenKernel::EvenKernel(Numeric numeric, DSeries ltaylor, double switch_radius) {
  auto d = std::make_shared<Data>();
  d->numeric = std::move(numeric);
  d->r0 = switch_radius;
  bool zero = true;
  for (double c : ltaylor.coeffs())
    if (c != 0.0) { zero = false; break; }
  if (zero) {
    for (double probe : {0.7, 1.9, 13.0})
      if (d->numeric(probe) != 0.0) { zero = false; break; }
  }
  d->zero = zero;
  d->ltaylor = std::move(ltaylor);
  d_ = std::move(d);
}

double EvenKernel::taylor_eval(double lambda) const {
  const auto& c = d_->ltaylor.coeffs();
  double acc = 0.0;
  for (int k = int(c.size()) - 1; k >= 0; --k) acc = acc * lambda + c[k];
  return acc;
}

double EvenKernel::operator()(double lambda) const {
  lambda = std::fabs(lambda);
  if (lambda < d_->r0) return taylor_eval(lambda);
  return d_->numeric(lambda);
}

const DSeries& EvenKernel::taylor() const { return d_->ltaylor; }
double EvenKernel::switch_radius() const { return d_->r0; }
bool EvenKernel::identically_zero() const { return d_->zero; }

double EvenKernel::seam_error() const {
  double worst = 0.0;
  for (double f : {0.8, 1.0, 1.25}) {
    double lam = f * d_->r0;
    double a = taylor_eval(lam), b = d_->numeric(lam);
    worst = std::max(worst, std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-30}));
  }
  return worst;
}

EvenKernel re_part(const Kernel& f) {
  const DSeries& c = f.taylor();
  DSeries t(c.order(), "lambda");
  double sign = 1.0;
  for (int n = 0; 2 * n <= c.order(); ++n) {
    t.set(2 * n, sign * c[2 * n]);
    sign = -sign;
  }
  Kernel src = f;
  return EvenKernel([src](double l) { return src(l).real(); }, std::move(t),
                    f.switch_radius());
}

EvenKernel im_over_lambda(const Kernel& f) {
  const DSeries& c = f.taylor();
  DSeries t(std::max(c.order() - 1, 0), "lambda");
  double sign = 1.0;
  for (int n = 0; 2 * n + 1 <= c.order() && 2 * n <= t.order(); ++n) {
    t.set(2 * n, sign * c[2 * n + 1]);
    sign = -sign;
  }
  Kernel src = f;
  return EvenKernel([src](double l) { return src(l).imag() / l; }, std::move(t),
                    f.switch_radius());
}

EvenKernel t_even(int j, const EvenKernel& h) {
  if (j < 0) throw std::invalid_argument("t_even: j must be >= 0");
  if (j == 0) return h;
  const DSeries& c = h.taylor();
  if (c.order() < 2 * j + 8)
    throw std::invalid_argument("t_even: Taylor branch too short for T_j");
  DSeries t(c.order() - 2 * j, "lambda");
  for (int i = 0; i + 2 * j <= c.order(); ++i) t.set(i, c[i + 2 * j]);
  std::vector<double> head(j);  // lambda^{2k} coefficients, k = 0..j-1
  for (int k = 0; k < j; ++k) head[k] = c[2 * k];
  EvenKernel src = h;
  auto numeric = [src, head, j](double l) {
    double u = 1.0 / (l * l);
    double uj = 1.0;
    for (int i = 0; i < j; ++i) uj *= u;
    double acc = src(l) * uj;
    double up = uj;  // u^{j-k}
    for (int k = 0; k < j; ++k) {
      acc -= head[k] * up;
      up /= u;
    }
    return acc;
  };
  return EvenKernel(numeric, std::move(t), h.switch_radius());
}

Kernel t_tilde(int j, const Kernel& f) {
  if (j < 0) throw std::invalid_argument("t_tilde: j must be >= 0");
  if (j == 0) return f;
  if (!f.vanishes_at_zero())
    throw std::invalid_argument("t_tilde: kernel must vanish at 0");
  const DSeries& c = f.taylor();
  if (c.order() < j + 8)
    throw std::invalid_argument("t_tilde: Taylor branch too short for T~_j");
  DSeries t(c.order() - j, "w");
  for (int i = 1; i + j <= c.order(); ++i) t.set(i, c[i + j]);
  std::vector<double> head(j + 1, 0.0);  // w^m coefficients, m = 1..j
  for (int m = 1; m <= j; ++m) head[m] = c[m];
  Kernel src = f;
  auto numeric = [src, head, j](double l) {
    cd w(0.0, l);
    cd winvj = 1.0 / wpow(l, j);
    cd acc = src(l) * winvj;
    cd wp = winvj * w;  // w^{m-j}
    for (int m = 1; m <= j; ++m) {
      acc -= head[m] * wp;
      wp *= w;
    }
    return acc;
  };
  return Kernel(numeric, std::move(t), f.switch_radius(), f.parity_tag(),
                /*vanishes=*/true);
}

// ---------------------------------------------------------------------------
// h kernels

Kernel h_kernel(const IncrementModel& model, int k, HVariant variant,
                const KernelConfig& cfg) {
  if (k < 1) throw std::invalid_argument("h_kernel: k must be >= 1");
  const int M = cfg.taylor_order;
  if (model.moment_order() < k + 2 + M) {
    std::ostringstream os;
    os << "h_kernel: moment table (order " << model.moment_order()
       << ") does not cover k + 2 + M = " << (k + 2 + M);
    throw std::invalid_argument(os.str());
  }
  // P(w) = sum mu_{k+1+m} w^m/(m+1)!, Q(w) = sum mu_{m+2} w^m/(m+2)!,
  // h_k = ((2 mu_{k+1} Q - P)/w) / Q.
  DSeries P(M + 1, "w"), Q(M + 1, "w");
  double fac = 1.0;
  for (int m = 0; m <= M + 1; ++m) {
    fac *= (m + 1);  // (m+1)!
    P.set(m, model.raw_moment(k + 1 + m) / fac);
  }
  fac = 2.0;
  for (int m = 0; m <= M + 1; ++m) {
    if (m > 0) fac *= (m + 2);  // (m+2)!
    Q.set(m, model.raw_moment(m + 2) / fac);
  }
  DSeries num = P.scaled(-1.0) + Q.scaled(2.0 * model.raw_moment(k + 1));
  DSeries numshift(M, "w");
  for (int i = 0; i <= M; ++i) numshift.set(i, num[i + 1]);
  DSeries h = numshift / Q.truncated(M);

  double shift = 0.0;
  bool vanishes = false;
  if (variant == HVariant::h_tilde) {
    shift = -h[0];
    h.set(0, 0.0);
    vanishes = true;
  }
  const double mu_k = model.raw_moment(k);
  const double mu_k1 = model.raw_moment(k + 1);
  IncrementModel mcopy = model;
  auto numeric = [mcopy, k, mu_k, mu_k1, shift](double l) {
    cd il(0.0, l);
    cd g = mcopy.mgf(0, il);
    cd gk = mcopy.mgf(k, il);
    return (gk - mu_k) / (1.0 - g) - cd(0.0, 2.0 * mu_k1 / l) + shift;
  };
  return Kernel(numeric, std::move(h), cfg.lambda0, /*parity=*/true, vanishes);
}

DSeries w_series(const IncrementModel& model, int order) {
  DSeries w = model.phi2_series(order) -
              model.phi1_series(order).scaled(2.0 * model.raw_moment(3) / 3.0);
  return w;
}

DSeries chi_series(const IncrementModel& model, int order) {
  // chi = -2 (phi'/theta) / W
  DSeries pot(order, "theta");  // phi'(theta)/theta
  double fac = 1.0;
  for (int k = 0; k <= order; ++k) {
    fac *= (k + 1);  // (k+1)!
    pot.set(k, model.raw_moment(k + 2) / fac);
  }
  return (pot / w_series(model, order)).scaled(-2.0);
}

// ---------------------------------------------------------------------------
// G~ powers

struct GtildePowers::Core {
  std::vector<Kernel> ht;   // h~_1..h~_N
  DSeries winv;             // 1/W to order N
  int order = 0;
  int pmax = 0;
  double r0 = 0.25;
  // Taylor side: taylor[p][k], w-series of theta^k coefficient of G~^p.
  std::vector<std::vector<DSeries>> taylor;

  // Numeric side: values g[p][k] at one lambda.
  std::vector<std::vector<cd>> values(double lambda) const {
    const int N = order;
    std::vector<cd> hv(N + 1, 0.0);
    for (int k = 1; k <= N; ++k) hv[k] = ht[k - 1](lambda);
    std::vector<std::vector<cd>> g(pmax + 1, std::vector<cd>(N + 1, 0.0));
    double fac = 1.0;
    std::vector<cd> base(N + 1, 0.0);  // H~ theta-coefficients h~_k/k!
    for (int k = 1; k <= N; ++k) {
      fac *= k;
      base[k] = hv[k] / fac;
    }
    for (int k = 1; k <= N; ++k) {  // G~ = winv * H~
      cd acc = 0.0;
      for (int i = 0; i + 1 <= k; ++i) acc += winv[i] * base[k - i];
      g[1][k] = acc;
    }
    for (int p = 2; p <= pmax; ++p)
      for (int k = p; k <= N; ++k) {
        cd acc = 0.0;
        for (int n = p - 1; n + 1 <= k; ++n) acc += g[p - 1][n] * g[1][k - n];
        g[p][k] = acc;
      }
    return g;
  }
};

GtildePowers::GtildePowers(const IncrementModel& model, int p_max, int theta_order,
                           const KernelConfig& cfg) {
  if (theta_order < p_max)
    throw std::invalid_argument("gtilde_powers: theta order must be >= p_max");
  auto core = std::make_shared<Core>();
  core->order = theta_order;
  core->pmax = p_max;
  core->r0 = cfg.lambda0;
  for (int k = 1; k <= theta_order; ++k)
    core->ht.push_back(h_kernel(model, k, HVariant::h_tilde, cfg));
  core->winv = DSeries::constant(1.0, theta_order, "theta") / w_series(model, theta_order);

  const int M = cfg.taylor_order;
  const int N = theta_order;
  auto zero = [&] { return DSeries(M, "w"); };
  core->taylor.assign(p_max + 1, std::vector<DSeries>(N + 1, zero()));
  std::vector<DSeries> base(N + 1, zero());
  double fac = 1.0;
  for (int k = 1; k <= N; ++k) {
    fac *= k;
    base[k] = core->ht[k - 1].taylor().truncated(M).scaled(1.0 / fac);
  }
  for (int k = 1; k <= N; ++k) {
    DSeries acc = zero();
    for (int i = 0; i + 1 <= k; ++i) acc = acc + base[k - i].scaled(core->winv[i]);
    core->taylor[1][k] = acc;
  }
  for (int p = 2; p <= p_max; ++p)
    for (int k = p; k <= N; ++k) {
      DSeries acc = zero();
      for (int n = p - 1; n + 1 <= k; ++n)
        acc = acc + core->taylor[p - 1][n] * core->taylor[1][k - n];
      core->taylor[p][k] = acc;
    }
  core_ = core;
  order_ = theta_order;
  pmax_ = p_max;
}

Kernel GtildePowers::coefficient(int k, int p) const {
  if (p < 1 || p > pmax_ || k < 0 || k > order_)
    throw std::invalid_argument("gtilde_powers: coefficient index out of range");
  auto core = core_;
  auto numeric = [core, k, p](double l) { return core->values(l)[p][k]; };
  return Kernel(numeric, core->taylor[p][k], core->r0, /*parity=*/true,
                /*vanishes=*/true);
}

// ---------------------------------------------------------------------------
// Reduced kernels

ReducedKernels assemble_reduced_kernels(const IncrementModel& model, int theta_order,
                                        const KernelConfig& cfg) {
  const int N = theta_order;
  GtildePowers g(model, N, N, cfg);
  ReducedKernels out;
  out.order = N;
  out.kernels.resize(N);
  for (int m = 1; m <= N; ++m) {
    out.kernels[m - 1].reserve(m);
    for (int j = 0; j <= m - 1; ++j) {
      std::vector<std::pair<double, Kernel>> terms;
      for (int p = 1; p <= m - j; ++p) {
        double c = -binom(p + j - 1, j) / p;
        terms.emplace_back(c, t_tilde(j, g.coefficient(m - j, p)));
      }
      out.kernels[m - 1].push_back(Kernel::linear_combination(terms));
    }
  }
  return out;
}

Kernel e_jm_printed(const GtildePowers& g, int j, int m, EjmConvention conv) {
  std::vector<std::pair<double, Kernel>> terms;
  for (int k = 0; k <= m - j - 1; ++k) {
    int p = m - j - k;
    double c = -binom(m - k - 1, j) / p;
    int kk = (conv == EjmConvention::offset) ? k + p : k;
    if (kk < p || kk > g.theta_order()) continue;  // zero coefficient
    terms.emplace_back(c, t_tilde(j, g.coefficient(kk, p)));
  }
  if (terms.empty())
    throw std::invalid_argument("e_jm_printed: all terms vanish for this (j, m)");
  return Kernel::linear_combination(terms);
}

// ---------------------------------------------------------------------------
// Log kernels for the direct tier

Kernel log_s_kernel(const IncrementModel& model, const KernelConfig& cfg) {
  const int M = std::max(cfg.taylor_order, 40);
  DSeries twoU(M, "w");
  double fac = 2.0;
  for (int m = 0; m <= M; ++m) {
    if (m > 0) fac *= (m + 2);
    twoU.set(m, 2.0 * model.raw_moment(m + 2) / fac);
  }
  DSeries t = twoU.log();
  IncrementModel mc = model;
  auto numeric = [mc](double l) {
    cd g = mc.mgf(0, cd(0.0, l));
    return std::log(2.0 * (1.0 - g) / (l * l));
  };
  return Kernel(numeric, std::move(t), cfg.lambda0, /*parity=*/true, /*vanishes=*/true);
}

Kernel log_rho_kernel(const IncrementModel& model, double theta,
                      const KernelConfig& cfg) {
  if (!(theta > 0.0) || !(theta < 0.5 * model.eta()))
    throw std::invalid_argument("log_rho_kernel: need theta in (0, eta/2)");
  // Taylor tail ratio at the branch switch can reach ~0.6, so keep the order
  // high enough for a clean seam.
  const int M = std::max(cfg.taylor_order, 40);
  // The integrand's Taylor series in w has a finite radius 2 phi'(theta)
  // (the zero of the log argument at w = -2 phi'); the branch switch must
  // stay well inside it.
  // log arg = 2 A(w) / (w + 2 phi'), A(w) = sum gamma^{(m+1)}(theta) w^m/(m+1)!
  DSeries A(M, "w");
  for (int m = 0; m <= M; ++m)
    A.set(m, model.mgf_over_factorial(m + 1, theta).real());
  const double phi1 = A[0];  // gamma'(theta), same evaluation path as A
  DSeries D(M, "w");
  D.set(0, 2.0 * phi1);
  if (M >= 1) D.set(1, 1.0);
  DSeries ratio = A.scaled(2.0) / D;
  ratio.set(0, 1.0);  // exact by construction
  DSeries t = ratio.log();
  IncrementModel mc = model;
  auto numeric = [mc, theta, phi1](double l) {
    cd il(0.0, l);
    cd gt = mc.mgf(0, cd(theta, 0.0));
    cd gtl = mc.mgf(0, theta + il);
    return std::log(2.0 * (gt - gtl) / (l * (l - cd(0.0, 2.0 * phi1))));
  };
  const double r0 = tune_radius(numeric, t, std::min(cfg.lambda0, phi1));
  return Kernel(numeric, std::move(t), r0, /*parity=*/true, /*vanishes=*/true);
}

HTildeAt h_tilde_at(const IncrementModel& model, double theta,
                    const KernelConfig& cfg) {
  if (!(std::fabs(theta) < 0.5 * model.eta()))
    throw std::invalid_argument("h_tilde_at: need |theta| < eta/2");
  const int M = std::max(cfg.taylor_order, 40);
  // H(theta, .)(w) = 1 + (2 phi' Q(w) - A(w))/(w Q(w)); subtract the constant.
  DSeries A(M + 1, "w"), Q(M + 1, "w");
  for (int m = 0; m <= M + 1; ++m)
    A.set(m, model.mgf_over_factorial(m + 1, theta).real());
  double fac = 2.0;
  for (int m = 0; m <= M + 1; ++m) {
    if (m > 0) fac *= (m + 2);
    Q.set(m, model.raw_moment(m + 2) / fac);
  }
  const double phi1 = A[0];
  DSeries num = Q.scaled(2.0 * phi1) - A;  // constant term exactly 0
  DSeries numshift(M, "w");
  for (int i = 0; i <= M; ++i) numshift.set(i, num[i + 1]);
  DSeries ratio = numshift / Q.truncated(M);
  const double h0 = 1.0 + ratio[0];   // H(theta, 0)
  const double W = -ratio[0];         // 1 - H(theta, 0)
  if (!(W > 0.0))
    throw std::invalid_argument("h_tilde_at: W(theta) <= 0, theta outside usable range");
  DSeries t = ratio;
  t.set(0, 0.0);
  IncrementModel mc = model;
  auto numeric = [mc, theta, phi1, h0](double l) {
    cd il(0.0, l);
    cd g = mc.mgf(0, il);
    cd gt = mc.mgf(0, cd(theta, 0.0));
    cd gtl = mc.mgf(0, theta + il);
    cd H = 1.0 - cd(0.0, 2.0 * phi1 / l) - (gt - gtl) / (1.0 - g);
    return H - h0;
  };
  HTildeAt out;
  out.kernel = Kernel(numeric, std::move(t), cfg.lambda0, /*parity=*/true,
                      /*vanishes=*/true);
  out.w = W;
  out.phi1 = phi1;
  out.psi = 2.0 * phi1 / W;
  return out;
}

Kernel log_i_kernel(const IncrementModel& model, double theta,
                    const KernelConfig& cfg) {
  if (!(theta > 0.0))
    throw std::invalid_argument("log_i_kernel: need theta > 0");
  HTildeAt h = h_tilde_at(model, theta, cfg);
  const int M = h.kernel.taylor().order();
  // v(w) = (1/W) w H~(w) / (w + Psi)
  DSeries num(M, "w");
  for (int i = 1; i <= M; ++i) num.set(i, h.kernel.taylor()[i - 1]);
  DSeries den(M, "w");
  den.set(0, h.w * h.psi);
  if (M >= 1) den.set(1, h.w);
  DSeries v = num / den;
  DSeries one_minus_v = -v;
  one_minus_v.set(0, 1.0);
  DSeries t = one_minus_v.log();
  Kernel hk = h.kernel;
  const double W = h.w, Psi = h.psi;
  auto numeric = [hk, W, Psi](double l) {
    cd v = l * hk(l) / (W * (l - cd(0.0, Psi)));
    return std::log(1.0 - v);
  };
  // The pole of w/(w + Psi) at w = -Psi limits the Taylor radius.
  const double r0 = tune_radius(numeric, t, std::min(cfg.lambda0, 0.5 * h.psi));
  return Kernel(numeric, std::move(t), r0, /*parity=*/true, /*vanishes=*/true);
}

double contraction_sup(const IncrementModel& model, double theta,
                       const KernelConfig& cfg) {
  HTildeAt h = h_tilde_at(model, theta, cfg);
  double sup = 0.0;
  const double lo = cfg.lambda0 / 4.0, hi = 1e6;
  const int n = 800;
  for (int i = 0; i <= n; ++i) {
    double l = lo * std::pow(hi / lo, double(i) / n);
    cd v = l * h.kernel(l) / (h.w * (l - cd(0.0, h.psi)));
    sup = std::max(sup, std::abs(v));
  }
  return sup;
}

}  // namespace cda
