#include "cda/increments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cda {

namespace {

using cd = std::complex<double>;

cd pow_int(cd base, int n) {
  if (n < 0) return 1.0 / pow_int(base, -n);
  cd r = 1.0;
  while (n) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Pascal triangle row-by-row in double; n small enough that precision is a
// non-issue for the consistency checks.
std::vector<std::vector<double>> binomials(int n) {
  std::vector<std::vector<double>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, 1.0);
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c;
}

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

}  // namespace

DistSpec DistSpec::parse(const std::string& text) {
  std::string name = text;
  std::string params;
  if (auto pos = text.find(':'); pos != std::string::npos) {
    name = text.substr(0, pos);
    params = text.substr(pos + 1);
  }
  DistSpec s;
  if (name == "gaussian") {
    s.family = Family::gaussian;
  } else if (name == "centered_exponential") {
    s.family = Family::centered_exponential;
  } else if (name == "laplace") {
    s.family = Family::laplace;
  } else if (name == "centered_uniform") {
    s.family = Family::centered_uniform;
  } else if (name == "shifted_gamma") {
    s.family = Family::shifted_gamma;
    if (params.rfind("shape=", 0) != 0)
      throw ModelError("shifted_gamma needs a shape parameter, e.g. shifted_gamma:shape=4");
    s.shape = std::stod(params.substr(6));
    if (!(s.shape >= 1.0 && s.shape <= 400.0))
      throw ModelError("shifted_gamma: shape must lie in [1, 400]");
    return s;
  } else {
    throw ModelError("unknown increment family: '" + name +
                     "' (supported: gaussian, centered_exponential, laplace, "
                     "centered_uniform, shifted_gamma:shape=<a>)");
  }
  if (!params.empty()) throw ModelError("family '" + name + "' takes no parameters");
  return s;
}

std::string DistSpec::str() const {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::centered_exponential: return "centered_exponential";
    case Family::laplace: return "laplace";
    case Family::centered_uniform: return "centered_uniform";
    case Family::shifted_gamma: {
      std::ostringstream os;
      os << "shifted_gamma:shape=" << shape;
      return os.str();
    }
  }
  return "?";
}

std::vector<double> moments_from_cumulants(const std::vector<double>& kappa) {
  int n = int(kappa.size()) - 1;
  auto C = binomials(std::max(n, 1));
  std::vector<double> mu(n + 1, 0.0);
  mu[0] = 1.0;
  for (int m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (int k = 1; k <= m; ++k) acc += C[m - 1][k - 1] * kappa[k] * mu[m - k];
    mu[m] = acc;
  }
  return mu;
}

std::vector<double> cumulants_from_moments(const std::vector<double>& mu) {
  int n = int(mu.size()) - 1;
  auto C = binomials(std::max(n, 1));
  std::vector<double> kappa(n + 1, 0.0);
  for (int m = 1; m <= n; ++m) {
    double acc = mu[m];
    for (int k = 1; k < m; ++k) acc -= C[m - 1][k - 1] * kappa[k] * mu[m - k];
    kappa[m] = acc;
  }
  return kappa;
}

IncrementModel IncrementModel::make(const DistSpec& spec, const ModelConfig& cfg) {
  IncrementModel m;
  m.spec_ = spec;
  int K = std::max(cfg.moment_order, 8);
  m.moments_.assign(K + 1, 0.0);
  m.moments_[0] = 1.0;

  switch (spec.family) {
    case Family::gaussian: {
      m.eta_ = 10.0;
      m.symmetric_ = true;
      for (int k = 2; k <= K; k += 2) m.moments_[k] = m.moments_[k - 2] * (k - 1);
      m.cumulants_.assign(K + 1, 0.0);
      m.cumulants_[2] = 1.0;
      break;
    }
    case Family::centered_exponential: {
      m.eta_ = 1.0;
      m.symmetric_ = false;
      // E (Z-1)^k for Z ~ Exp(1): the derangement numbers.
      double d = 1.0;
      for (int k = 1; k <= K; ++k) {
        d = k * d + ((k % 2 == 0) ? 1.0 : -1.0);
        m.moments_[k] = d;
      }
      m.cumulants_.assign(K + 1, 0.0);
      for (int k = 2; k <= K; ++k) m.cumulants_[k] = factorial(k - 1);
      break;
    }
    case Family::laplace: {
      m.eta_ = 1.0;
      m.symmetric_ = true;
      for (int k = 2; k <= K; k += 2)
        m.moments_[k] = m.moments_[k - 2] * k * (k - 1) / 2.0;
      m.cumulants_.assign(K + 1, 0.0);
      for (int k = 2; k <= K; k += 2)
        m.cumulants_[k] = factorial(k) / ((k / 2) * std::pow(2.0, k / 2));
      break;
    }
    case Family::centered_uniform: {
      m.eta_ = 10.0;
      m.symmetric_ = true;
      double p = 1.0;
      for (int k = 2; k <= K; k += 2) {
        p *= 3.0;
        m.moments_[k] = p / (k + 1);
      }
      m.cumulants_ = cumulants_from_moments(m.moments_);
      break;
    }
    case Family::shifted_gamma: {
      double a = spec.shape;
      m.eta_ = std::min(std::sqrt(a), 10.0);
      m.symmetric_ = false;
      m.cumulants_.assign(K + 1, 0.0);
      for (int k = 2; k <= K; ++k)
        m.cumulants_[k] = factorial(k - 1) * std::pow(a, 1.0 - k / 2.0);
      m.moments_ = moments_from_cumulants(m.cumulants_);
      break;
    }
  }

  if (cfg.run_nonlattice_gate) {
    double lo = cfg.nonlattice_delta, hi = cfg.nonlattice_cap;
    double best = 1e300;
    const int nlog = 2000, nlin = 2000;
    for (int i = 0; i < nlog; ++i) {
      double lam = lo * std::pow(hi / lo, double(i) / (nlog - 1));
      best = std::min(best, std::abs(1.0 - m.mgf(0, cd(0.0, lam))));
    }
    for (int i = 1; i <= nlin; ++i) {
      double lam = lo + (hi - lo) * double(i) / nlin;
      best = std::min(best, std::abs(1.0 - m.mgf(0, cd(0.0, lam))));
    }
    m.nonlattice_min_ = best;
    if (!(best > cfg.nonlattice_floor)) {
      std::ostringstream os;
      os << "nonlattice gate failed for " << spec.str() << ": min |1-g| = " << best
         << " on [" << lo << ", " << hi << "]";
      throw ModelError(os.str());
    }
  }
  return m;
}

double IncrementModel::raw_moment(int k) const {
  if (k < 0 || k > moment_order())
    throw std::invalid_argument("raw_moment: order outside precomputed table");
  return moments_[k];
}

double IncrementModel::cumulant(int k) const {
  if (k < 0 || k > moment_order())
    throw std::invalid_argument("cumulant: order outside precomputed table");
  return cumulants_[k];
}

std::complex<double> IncrementModel::mgf_over_factorial(int k, cd z) const {
  if (k < 0) throw std::invalid_argument("mgf: negative derivative order");
  if (!(std::fabs(z.real()) < eta_)) {
    std::ostringstream os;
    os << "mgf: Re z = " << z.real() << " outside analyticity strip |Re z| < " << eta_;
    throw std::invalid_argument(os.str());
  }
  switch (spec_.family) {
    case Family::gaussian: {
      // gamma^(k)(z)/k! = b_k(z) exp(z^2/2), b_0 = 1, b_{m+1} = (b_m' + z b_m)/(m+1).
      std::vector<double> b{1.0};
      for (int mm = 0; mm < k; ++mm) {
        std::vector<double> nb(b.size() + 1, 0.0);
        for (int j = 0; j + 1 < int(b.size()); ++j) nb[j] += (j + 1) * b[j + 1];
        for (int j = 0; j < int(b.size()); ++j) nb[j + 1] += b[j];
        for (double& v : nb) v /= (mm + 1);
        b = std::move(nb);
      }
      cd val = 0.0, zp = 1.0;
      for (double coef : b) { val += coef * zp; zp *= z; }
      return val * std::exp(0.5 * z * z);
    }
    case Family::centered_exponential: {
      // e^{-z} sum_j [(-1)^j / j!] (1-z)^{-(k-j+1)}
      cd r = 1.0 / (1.0 - z);
      cd q = pow_int(r, k + 1);
      cd acc = 0.0;
      double inv_jfac = 1.0;
      for (int j = 0; j <= k; ++j) {
        acc += ((j % 2 == 0) ? inv_jfac : -inv_jfac) * q;
        q *= (1.0 - z);
        inv_jfac /= (j + 1);
      }
      return acc * std::exp(-z);
    }
    case Family::laplace: {
      cd rm = 1.0 / (1.0 - z / kSqrt2), rp = 1.0 / (1.0 + z / kSqrt2);
      cd val = pow_int(rm, k + 1) + ((k % 2 == 0) ? 1.0 : -1.0) * pow_int(rp, k + 1);
      return val * std::pow(2.0, -0.5 * k - 1.0);
    }
    case Family::centered_uniform: {
      const double a = kSqrt3;
      if (std::abs(z) < 3.0) {
        // moment series; terms decay factorially well before the table ends
        cd sum = 0.0, zp = 1.0;
        double inv_mfac = 1.0;
        int quiet = 0;
        for (int mm = 0; mm + k <= moment_order(); ++mm) {
          cd term = moments_[k + mm] * zp * inv_mfac;
          sum += term;
          zp *= z;
          inv_mfac /= (mm + 1);
          if (std::abs(term) < 1e-22 * (1.0 + std::abs(sum))) {
            if (++quiet >= 3) break;
          } else {
            quiet = 0;
          }
        }
        return sum / factorial(k);
      }
      cd az = a * z, sh = std::sinh(az), ch = std::cosh(az);
      cd inv_z = 1.0 / z;
      cd acc = 0.0;
      double aj_jfac = 1.0;  // a^j / j!
      cd zpow = pow_int(inv_z, k + 1);  // z^{-(k-j+1)} at j=0
      for (int j = 0; j <= k; ++j) {
        cd shc = (j % 2 == 0) ? sh : ch;
        double sgn = ((k - j) % 2 == 0) ? 1.0 : -1.0;
        acc += shc * aj_jfac * sgn * zpow / a;
        aj_jfac *= a / (j + 1);
        zpow *= z;
      }
      return acc;
    }
    case Family::shifted_gamma: {
      const double a = spec_.shape, sa = std::sqrt(a);
      cd r = 1.0 - z / sa;
      cd logr = std::log(r);
      cd acc = 0.0;
      // term_j = [(-sa)^j / j!] * [poch(a, k-j)/(k-j)!] a^{-(k-j)/2} r^{-(a+k-j)}
      std::vector<double> poch_over_fac(k + 1);  // poch(a,m)/m! * a^{-m/2}
      poch_over_fac[0] = 1.0;
      for (int mm = 1; mm <= k; ++mm)
        poch_over_fac[mm] = poch_over_fac[mm - 1] * (a + mm - 1) / (mm * sa);
      double saj_jfac = 1.0;
      for (int j = 0; j <= k; ++j) {
        int mm = k - j;
        cd rpow = std::exp(-(a + mm) * logr);
        acc += ((j % 2 == 0) ? saj_jfac : -saj_jfac) * poch_over_fac[mm] * rpow;
        saj_jfac *= sa / (j + 1);
      }
      return acc * std::exp(-sa * z);
    }
  }
  return 0.0;
}

std::complex<double> IncrementModel::mgf(int k, cd z) const {
  return mgf_over_factorial(k, z) * factorial(k);
}

double IncrementModel::psi(double t) const {
  switch (spec_.family) {
    case Family::gaussian: return 0.5 * t * t;
    case Family::centered_exponential: return -t - std::log1p(-t);
    case Family::laplace: return -std::log1p(-0.5 * t * t);
    case Family::centered_uniform: {
      double x = kSqrt3 * t;
      if (std::fabs(x) < 1e-3) {
        double x2 = x * x;
        return x2 / 6.0 - x2 * x2 / 180.0;
      }
      return std::log(std::sinh(x) / x);
    }
    case Family::shifted_gamma: {
      double sa = std::sqrt(spec_.shape);
      return -sa * t - spec_.shape * std::log1p(-t / sa);
    }
  }
  return 0.0;
}

double IncrementModel::psi1(double t) const {
  switch (spec_.family) {
    case Family::gaussian: return t;
    case Family::centered_exponential: return t / (1.0 - t);
    case Family::laplace: return t / (1.0 - 0.5 * t * t);
    case Family::centered_uniform: {
      double x = kSqrt3 * t;
      if (std::fabs(x) < 1e-3) return t - 0.2 * t * t * t;  // t - t^3/5 + O(t^5)
      return kSqrt3 * (std::cosh(x) / std::sinh(x)) - 1.0 / t;
    }
    case Family::shifted_gamma: {
      double sa = std::sqrt(spec_.shape);
      return t / (1.0 - t / sa);
    }
  }
  return 0.0;
}

double IncrementModel::psi2(double t) const {
  switch (spec_.family) {
    case Family::gaussian: return 1.0;
    case Family::centered_exponential: {
      double d = 1.0 - t;
      return 1.0 / (d * d);
    }
    case Family::laplace: {
      double d = 1.0 - 0.5 * t * t;
      return (1.0 + 0.5 * t * t) / (d * d);
    }
    case Family::centered_uniform: {
      double x = kSqrt3 * t;
      if (std::fabs(x) < 1e-3) return 1.0 - 0.6 * t * t;
      double sh = std::sinh(x);
      return 1.0 / (t * t) - 3.0 / (sh * sh);
    }
    case Family::shifted_gamma: {
      double d = 1.0 - t / std::sqrt(spec_.shape);
      return 1.0 / (d * d);
    }
  }
  return 0.0;
}

double IncrementModel::conjugate_theta1(double delta) const {
  if (!(delta > 0.0)) throw std::invalid_argument("conjugate_theta1: need delta > 0");
  if (!(delta < 2.0 * eta_))
    throw std::invalid_argument("conjugate_theta1: delta too large for the strip");
  auto h = [&](double t) { return psi(t) - psi(t - delta); };
  double lo = 1e-12, hi = eta_ * (1.0 - 1e-12);
  // keep theta0 = t - delta inside the strip
  lo = std::max(lo, delta - eta_ * (1.0 - 1e-12));
  if (!(lo < hi) || !(h(lo) < 0.0) || !(h(hi) > 0.0))
    throw std::invalid_argument("conjugate_theta1: no conjugate root inside the strip");
  for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double IncrementModel::theta0_from_drift(double mu) const {
  if (!(mu > 0.0)) throw std::invalid_argument("theta0_from_drift: need mu > 0");
  double lo = -eta_ * (1.0 - 1e-12), hi = -1e-300;
  if (!(psi1(lo) < -mu))
    throw std::invalid_argument("theta0_from_drift: drift outside attainable range");
  for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, std::fabs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    (psi1(mid) < -mu ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double IncrementModel::theta1_of_theta0(double theta0) const {
  if (!(theta0 < 0.0) || !(theta0 > -eta_))
    throw std::invalid_argument("theta1_of_theta0: need theta0 in (-eta, 0)");
  auto h = [&](double t) { return psi(t) - psi(theta0); };
  double lo = 1e-14, hi = eta_ * (1.0 - 1e-12);
  if (!(h(hi) > 0.0))
    throw std::invalid_argument("theta1_of_theta0: no conjugate inside the strip");
  for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DSeries IncrementModel::psi_series(int order) const {
  DSeries s(order, "theta");
  double fac = 1.0;
  for (int k = 1; k <= order; ++k) {
    fac *= k;
    if (k <= moment_order()) s.set(k, cumulants_[k] / fac);
  }
  return s;
}

DSeries IncrementModel::phi1_series(int order) const {
  DSeries s(order, "theta");
  double fac = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fac *= k;
    if (k + 1 <= moment_order()) s.set(k, moments_[k + 1] / fac);
  }
  return s;
}

DSeries IncrementModel::phi2_series(int order) const {
  DSeries s(order, "theta");
  double fac = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fac *= k;
    if (k + 2 <= moment_order()) s.set(k, moments_[k + 2] / fac);
  }
  return s;
}

DSeries IncrementModel::theta1_series(int order) const {
  if (order < 1) throw std::invalid_argument("theta1_series: order must be >= 1");
  int W = order + 2;
  // u = 2 psi / theta^2, q = theta sqrt(u); psi(theta0)=psi(theta1) becomes
  // q(theta0) = -q(theta1) on the negative branch.
  DSeries u(W, "theta1");
  double fac = 2.0;  // (m+2)! running
  for (int mm = 0; mm <= W; ++mm) {
    if (mm > 0) fac *= (mm + 2);
    if (mm + 2 <= moment_order()) u.set(mm, 2.0 * cumulants_[mm + 2] / fac);
  }
  DSeries su = u.sqrt();
  DSeries q(W, "theta1");
  for (int mm = 0; mm + 1 <= W; ++mm) q.set(mm + 1, su[mm]);
  DSeries qinv = q.revert("qv");
  DSeries theta0 = compose(qinv, -q);             // series in theta1
  DSeries delta = DSeries::identity(W, "theta1") - theta0;
  return delta.revert("Delta").truncated(order);
}

TiltedSampler::TiltedSampler(const IncrementModel& model, double theta,
                             std::uint64_t seed, std::uint64_t stream)
    : model_(model), theta_(theta), rng_(seed, stream) {
  if (!(std::fabs(theta) < model.eta()))
    throw std::invalid_argument("TiltedSampler: theta outside the strip");
}

double TiltedSampler::tilted_mean() const { return model_.psi1(theta_); }

double TiltedSampler::draw(std::uint64_t i) const {
  switch (model_.spec().family) {
    case Family::gaussian:
      return theta_ + rng_.normal(i, 0);
    case Family::centered_exponential:
      return -1.0 - std::log(rng_.u01(i, 0)) / (1.0 - theta_);
    case Family::laplace: {
      const double s = kSqrt2;
      double pm = (s - theta_) / (2.0 * s);
      double u = rng_.u01(i, 0);
      if (u <= pm) return std::log(u / pm) / (theta_ + s);
      return -std::log((1.0 - u) / (1.0 - pm)) / (s - theta_);
    }
    case Family::centered_uniform: {
      const double a = kSqrt3;
      double u = rng_.u01(i, 0);
      if (std::fabs(theta_) < 1e-10) return -a + 2.0 * a * u;
      // inverse CDF of density prop. to e^{theta x} on (-a, a)
      double ea = std::exp(-theta_ * a), eb = std::exp(theta_ * a);
      return std::log(ea + u * (eb - ea)) / theta_;
    }
    case Family::shifted_gamma: {
      const double a = model_.spec().shape, sa = std::sqrt(a);
      const double scale = 1.0 / (1.0 - theta_ / sa);
      // Marsaglia–Tsang; each rejection round has its own draw indices.
      const double d = a - 1.0 / 3.0, c = 1.0 / (3.0 * std::sqrt(d));
      for (std::uint32_t round = 0;; ++round) {
        double x = rng_.normal(i, 2 * round);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = rng_.u01(i, 2 * round + 1);
        if (u < 1.0 - 0.0331 * x * x * x * x ||
            std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
          double z = d * v * scale;
          return (z - a) / sa;
        }
      }
    }
  }
  return 0.0;
}

std::vector<double> sample_tilted(const IncrementModel& model, double theta,
                                  std::uint64_t seed, std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample_tilted: need n >= 1");
  TiltedSampler s(model, theta, seed, /*stream=*/0);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = s.draw(i);
  return out;
}

}  // namespace cda
