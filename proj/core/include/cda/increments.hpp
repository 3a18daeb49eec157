#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/pseries.hpp"
#include "cda/rng.hpp"

namespace cda {

// A distribution was rejected at construction (unknown family, bad
// parameters, or failed nonlattice gate).
struct ModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Family {
  gaussian,
  centered_exponential,
  laplace,
  centered_uniform,
  shifted_gamma,
};

struct DistSpec {
  Family family = Family::gaussian;
  double shape = 0.0;  // shifted_gamma only

  // Parses "gaussian", "centered_exponential", "laplace", "centered_uniform",
  // "shifted_gamma:shape=4".
  static DistSpec parse(const std::string& text);
  std::string str() const;
};

struct ModelConfig {
  int moment_order = 64;          // raw moments / cumulants kept through this order
  double nonlattice_delta = 1e-2; // gate grid lower end
  double nonlattice_cap = 200.0;  // gate grid upper end
  double nonlattice_floor = 1e-7; // min |1 - g| accepted on the grid
  bool run_nonlattice_gate = true;
};

// A standardized light-tailed increment law: EX = 0, Var X = 1, MGF
// gamma(z) = E exp(zX) analytic on |Re z| < eta. All evaluators are closed
// forms per family; tables are precomputed at construction.
class IncrementModel {
 public:
  static IncrementModel make(const DistSpec& spec, const ModelConfig& cfg = {});
  static IncrementModel make(const std::string& spec_text, const ModelConfig& cfg = {}) {
    return make(DistSpec::parse(spec_text), cfg);
  }

  const DistSpec& spec() const { return spec_; }
  std::string name() const { return spec_.str(); }
  double eta() const { return eta_; }
  bool symmetric() const { return symmetric_; }
  int moment_order() const { return int(moments_.size()) - 1; }

  double raw_moment(int k) const;  // mu_k
  double cumulant(int k) const;    // kappa_k
  const std::vector<double>& moments() const { return moments_; }

  // gamma^(k)(z) for |Re z| < eta. k = 0 is the MGF itself.
  std::complex<double> mgf(int k, std::complex<double> z) const;
  // gamma^(k)(z) / k!, the natural normalization for series work.
  std::complex<double> mgf_over_factorial(int k, std::complex<double> z) const;

  double psi(double theta) const;    // log phi
  double psi1(double theta) const;   // psi'
  double psi2(double theta) const;   // psi''
  double phi(double theta) const { return std::exp(psi(theta)); }
  double phi1(double theta) const { return psi1(theta) * phi(theta); }
  double phi2(double theta) const {
    return (psi2(theta) + psi1(theta) * psi1(theta)) * phi(theta);
  }

  // The positive conjugate root: psi(theta1) = psi(theta1 - delta) with
  // theta1 > 0 > theta1 - delta, by safeguarded bisection/secant.
  double conjugate_theta1(double delta) const;
  // theta0 < 0 from a drift mu = -psi'(theta0) > 0.
  double theta0_from_drift(double mu) const;
  // The conjugate of a given theta0 < 0 (returns theta1 > 0).
  double theta1_of_theta0(double theta0) const;

  // Formal series theta1(Delta) to the given order, from reverting
  // Delta(theta1) = theta1 - theta0(theta1) where psi(theta0) = psi(theta1).
  DSeries theta1_series(int order) const;

  // psi, phi', phi'' and 1/(2 psi / theta^2)-style helpers as theta-series
  // from the cumulant/moment tables.
  DSeries psi_series(int order) const;
  DSeries phi1_series(int order) const;   // phi'(theta)
  DSeries phi2_series(int order) const;   // phi''(theta)

  double nonlattice_gate_min() const { return nonlattice_min_; }

 private:
  IncrementModel() = default;

  DistSpec spec_;
  double eta_ = 0.0;
  bool symmetric_ = false;
  std::vector<double> moments_;    // mu_0..mu_K
  std::vector<double> cumulants_;  // kappa_0(=0), kappa_1..kappa_K
  double nonlattice_min_ = 1.0;
};

// Moment/cumulant conversions via the recursion
//   mu_n = sum_{k=1..n} C(n-1, k-1) kappa_k mu_{n-k}.
std::vector<double> moments_from_cumulants(const std::vector<double>& kappa);
std::vector<double> cumulants_from_moments(const std::vector<double>& mu);

// Exponentially tilted sampler: p_theta(dx) = exp(theta x - psi(theta)) p(dx),
// via family-specific closed forms. Deterministic per (seed, stream, i).
class TiltedSampler {
 public:
  TiltedSampler(const IncrementModel& model, double theta,
                std::uint64_t seed, std::uint64_t stream = 0);

  double operator()(std::uint64_t i) const { return draw(i); }
  double draw(std::uint64_t i) const;
  double tilted_mean() const;  // psi'(theta)

  const IncrementModel& model() const { return model_; }
  double theta() const { return theta_; }

 private:
  IncrementModel model_;
  double theta_;
  CounterRng rng_;
};

// n i.i.d. samples from the tilted law, one stream.
std::vector<double> sample_tilted(const IncrementModel& model, double theta,
                                  std::uint64_t seed, std::size_t n);

}  // namespace cda
