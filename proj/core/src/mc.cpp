#include "cda/mc.hpp"

#include <cmath>

namespace cda {

namespace {

// Per-path sample index: path i, step j -> i * 2^24 + j. Keeps every step of
// every path on its own counter so chunked runs reproduce bit-identically.
constexpr std::uint64_t kStepStride = std::uint64_t(1) << 24;

struct RunningStats {
  double sum = 0.0, sumsq = 0.0;
  std::uint64_t n = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return sum / double(n); }
  double sd() const {
    double m = mean();
    double var = std::max(0.0, sumsq / double(n) - m * m);
    return std::sqrt(var * double(n) / std::max<double>(1.0, double(n) - 1));
  }
  double se() const { return sd() / std::sqrt(double(n)); }
};

}  // namespace

McEstimate is_crossing_prob(const IncrementModel& model, double theta0, double x,
                            std::uint64_t n, std::uint64_t seed,
                            const McOptions& opts) {
  if (!(theta0 < 0.0)) throw std::invalid_argument("is_crossing_prob: need theta0 < 0");
  if (!(x > 0.0)) throw std::invalid_argument("is_crossing_prob: need x > 0");
  if (n < 1) throw std::invalid_argument("is_crossing_prob: need n >= 1");
  const double theta1 = model.theta1_of_theta0(theta0);
  const double delta = theta1 - theta0;
  TiltedSampler sampler(model, theta1, seed, /*stream=*/1);
  if (opts.max_steps_per_path > kStepStride)
    throw std::invalid_argument("is_crossing_prob: step budget exceeds counter stride");
  RunningStats st;
  for (std::uint64_t i = 0; i < n; ++i) {
    double s = 0.0;
    std::uint64_t steps = 0;
    while (s <= x) {
      if (++steps > opts.max_steps_per_path)
        throw McBudgetError("is_crossing_prob: path step budget exceeded");
      s += sampler.draw(i * kStepStride + steps);
    }
    st.add(std::exp(-delta * s));
  }
  McEstimate e;
  e.mean = st.mean();
  e.std_error = st.se();
  e.n = n;
  e.seed = seed;
  e.tag = "is_crossing_prob";
  return e;
}

McEstimate overshoot_transform(const IncrementModel& model, double theta, double b,
                               double x, std::uint64_t n, std::uint64_t seed,
                               const McOptions& opts) {
  if (!(theta > 0.0) || !(theta < model.eta()))
    throw std::invalid_argument("overshoot_transform: need theta in (0, eta)");
  if (b < 0.0) throw std::invalid_argument("overshoot_transform: need b >= 0");
  if (!(x > 0.0)) throw std::invalid_argument("overshoot_transform: need x > 0");
  TiltedSampler sampler(model, theta, seed, /*stream=*/2);
  RunningStats st;
  for (std::uint64_t i = 0; i < n; ++i) {
    double s = 0.0;
    std::uint64_t steps = 0;
    while (s <= x) {
      if (++steps > opts.max_steps_per_path)
        throw McBudgetError("overshoot_transform: path step budget exceeded");
      s += sampler.draw(i * kStepStride + steps);
    }
    st.add(std::exp(-b * (s - x)));
  }
  McEstimate e;
  e.mean = st.mean();
  e.std_error = b == 0.0 ? 0.0 : st.se();
  e.n = n;
  e.seed = seed;
  e.tag = "overshoot_transform";
  return e;
}

McEstimate lindley_mean(const IncrementModel& model, double theta0,
                        std::uint64_t n_cycles, std::uint64_t seed,
                        const McOptions& opts) {
  if (!(theta0 < 0.0)) throw std::invalid_argument("lindley_mean: need negative drift");
  if (n_cycles < 2) throw std::invalid_argument("lindley_mean: need n_cycles >= 2");
  TiltedSampler sampler(model, theta0, seed, /*stream=*/3);
  std::vector<double> ys, ls;
  ys.reserve(n_cycles);
  ls.reserve(n_cycles);
  std::uint64_t idx = 0;
  const std::uint64_t budget = opts.max_steps_per_path * n_cycles;
  for (std::uint64_t c = 0; c < n_cycles; ++c) {
    double w = 0.0, y = 0.0;
    std::uint64_t len = 0;
    do {
      if (++idx > budget) throw McBudgetError("lindley_mean: cycle budget exceeded");
      w = std::max(w + sampler.draw(idx), 0.0);
      y += w;
      ++len;
    } while (w > 0.0);
    ys.push_back(y);
    ls.push_back(double(len));
  }
  double sy = 0.0, sl = 0.0;
  for (std::uint64_t c = 0; c < n_cycles; ++c) {
    sy += ys[c];
    sl += ls[c];
  }
  double r = sy / sl, lbar = sl / double(n_cycles);
  RunningStats resid;
  for (std::uint64_t c = 0; c < n_cycles; ++c) resid.add(ys[c] - r * ls[c]);
  McEstimate e;
  e.mean = r;
  e.std_error = resid.sd() / (lbar * std::sqrt(double(n_cycles)));
  e.n = n_cycles;
  e.seed = seed;
  e.tag = "lindley_mean";
  return e;
}

LadderStats ladder_stats(const IncrementModel& model, double theta, double b,
                         std::uint64_t n, std::uint64_t seed, const McOptions& opts) {
  if (!(theta > 0.0) || !(theta < model.eta()))
    throw std::invalid_argument("ladder_stats: need theta in (0, eta) for finite tau+");
  if (!(b > 0.0)) throw std::invalid_argument("ladder_stats: need b > 0");
  TiltedSampler sampler(model, theta, seed, /*stream=*/4);
  RunningStats hs, ts;
  double cross = 0.0;  // sample covariance accumulator E[h t]
  for (std::uint64_t i = 0; i < n; ++i) {
    double s = 0.0;
    std::uint64_t steps = 0;
    while (s <= 0.0) {
      if (++steps > opts.max_steps_per_path)
        throw McBudgetError("ladder_stats: path step budget exceeded");
      s += sampler.draw(i * kStepStride + steps);
    }
    double t = std::exp(-b * s);
    hs.add(s);
    ts.add(t);
    cross += s * t;
  }
  double nh = double(n);
  double cov = (cross / nh - hs.mean() * ts.mean()) * nh / (nh - 1.0);
  LadderStats out;
  out.height_mean = {hs.mean(), hs.se(), n, seed, "ladder_height"};
  out.transform_mean = {ts.mean(), ts.se(), n, seed, "ladder_transform"};
  const double A = ts.mean(), B = hs.mean();
  double rhs = (1.0 - A) / (b * B);
  double dA = -1.0 / (b * B);
  double dB = -(1.0 - A) / (b * B * B);
  double var = dA * dA * ts.sd() * ts.sd() + dB * dB * hs.sd() * hs.sd() +
               2.0 * dA * dB * cov;
  out.renewal_rhs = {rhs, std::sqrt(std::max(0.0, var) / nh), n, seed, "renewal_rhs"};
  return out;
}

LadderIdentityCheck ladder_identity_check(const IncrementModel& model, double theta,
                                          double b, std::uint64_t n,
                                          std::uint64_t seed, const McOptions& opts) {
  LadderIdentityCheck out;
  out.lhs = overshoot_transform(model, theta, b, /*x=*/50.0, n, seed, opts);
  out.lhs.tag = "overshoot_transform_x50";
  LadderStats ls = ladder_stats(model, theta, b, n, seed, opts);
  out.rhs = ls.renewal_rhs;
  double denom = std::sqrt(out.lhs.std_error * out.lhs.std_error +
                           out.rhs.std_error * out.rhs.std_error);
  out.z = denom > 0.0 ? std::fabs(out.lhs.mean - out.rhs.mean) / denom : 0.0;
  return out;
}

}  // namespace cda
