#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "cda/increments.hpp"

namespace cda {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::string tag;
};

struct McBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct McOptions {
  std::uint64_t max_steps_per_path = 10'000'000;
};

// P_{theta0}(M > x) by Wald's identity: the average of exp(-Delta S_tau(x))
// over paths run under the conjugate positive-drift tilt theta1.
McEstimate is_crossing_prob(const IncrementModel& model, double theta0, double x,
                            std::uint64_t n, std::uint64_t seed,
                            const McOptions& opts = {});

// E_theta exp(-b R(x)) with R(x) the overshoot at level x (x large stands in
// for the renewal limit R(inf)).
McEstimate overshoot_transform(const IncrementModel& model, double theta, double b,
                               double x, std::uint64_t n, std::uint64_t seed,
                               const McOptions& opts = {});

// E_{theta0} M via regenerative cycles of W <- max(W + X, 0), ratio-of-means
// with delta-method standard error.
McEstimate lindley_mean(const IncrementModel& model, double theta0,
                        std::uint64_t n_cycles, std::uint64_t seed,
                        const McOptions& opts = {});

// Ladder-height statistics at positive-drift tilt theta: mean of S_{tau+} and
// of exp(-b S_{tau+}), with the delta-method estimate of the renewal identity
// right-hand side (1 - E exp(-b S)) / (b E S).
struct LadderStats {
  McEstimate height_mean;      // E S_{tau+}
  McEstimate transform_mean;   // E exp(-b S_{tau+})
  McEstimate renewal_rhs;      // (1 - E exp(-b S)) / (b E S)
};
LadderStats ladder_stats(const IncrementModel& model, double theta, double b,
                         std::uint64_t n, std::uint64_t seed,
                         const McOptions& opts = {});

struct LadderIdentityCheck {
  McEstimate lhs;  // overshoot transform at large x
  McEstimate rhs;  // renewal identity from direct tau+ simulation
  double z = 0.0;
};
LadderIdentityCheck ladder_identity_check(const IncrementModel& model, double theta,
                                          double b, std::uint64_t n,
                                          std::uint64_t seed,
                                          const McOptions& opts = {});

}  // namespace cda
