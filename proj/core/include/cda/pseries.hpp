#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cda/rational.hpp"

namespace cda {

// Truncated power series in one variable. Coefficient index = power, the
// truncation order N is inclusive (N + 1 stored coefficients). Arithmetic
// never reports coefficients beyond the minimum order of its inputs; when
// operand orders differ the event is counted in series_diagnostics().
//
// Scalar T is double for the numeric pipeline or Rational for the exact
// algebra tests. The mode is fixed at construction and never mixed.

struct SeriesDiagnostics {
  unsigned long long truncation_events = 0;
  int last_lhs_order = -1;
  int last_rhs_order = -1;
  void reset() { *this = SeriesDiagnostics{}; }
};

inline SeriesDiagnostics& series_diagnostics() {
  thread_local SeriesDiagnostics diag;
  return diag;
}

namespace detail {

template <class T>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_int(long long n) { return double(n); }
  static bool is_zero(double v) { return v == 0.0; }
  static double div_int(double v, long long n) { return v / double(n); }
};

template <>
struct ScalarOps<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_int(long long n) { return Rational(n); }
  static bool is_zero(const Rational& v) { return v.num() == 0; }
  static Rational div_int(const Rational& v, long long n) { return v / Rational(n); }
};

}  // namespace detail

template <class T>
class Series {
 public:
  using Ops = detail::ScalarOps<T>;

  Series() : c_(1, Ops::zero()) {}
  explicit Series(int order, std::string label = {})
      : c_(order + 1, Ops::zero()), label_(std::move(label)) {
    if (order < 0) throw std::invalid_argument("Series: negative order");
  }
  Series(std::vector<T> coeffs, std::string label = {})
      : c_(std::move(coeffs)), label_(std::move(label)) {
    if (c_.empty()) c_.assign(1, Ops::zero());
  }

  static Series constant(const T& v, int order, std::string label = {}) {
    Series s(order, std::move(label));
    s.c_[0] = v;
    return s;
  }
  // The identity series x, to the given order.
  static Series identity(int order, std::string label = {}) {
    Series s(order, std::move(label));
    if (order >= 1) s.c_[1] = Ops::one();
    return s;
  }

  int order() const { return int(c_.size()) - 1; }
  const std::vector<T>& coeffs() const { return c_; }
  const T& operator[](int k) const { return c_.at(k); }
  void set(int k, const T& v) { c_.at(k) = v; }
  const std::string& label() const { return label_; }
  Series with_label(std::string l) const {
    Series s = *this;
    s.label_ = std::move(l);
    return s;
  }

  Series truncated(int order) const {
    Series s(std::min(order, this->order()), label_);
    for (int k = 0; k <= s.order(); ++k) s.c_[k] = c_[k];
    return s;
  }
  // Keeps the same coefficients, padding with zeros up to `order`. This is an
  // explicit assertion by the caller that higher coefficients vanish; plain
  // arithmetic never extends orders.
  Series extended(int order) const {
    if (order <= this->order()) return truncated(order);
    Series s(order, label_);
    for (int k = 0; k <= this->order(); ++k) s.c_[k] = c_[k];
    return s;
  }

  friend Series operator+(const Series& a, const Series& b) {
    int n = merged_order(a, b);
    Series r(n, merged_label(a, b));
    for (int k = 0; k <= n; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Series operator-(const Series& a, const Series& b) {
    int n = merged_order(a, b);
    Series r(n, merged_label(a, b));
    for (int k = 0; k <= n; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  Series operator-() const {
    Series r(order(), label_);
    for (int k = 0; k <= order(); ++k) r.c_[k] = -c_[k];
    return r;
  }
  friend Series operator*(const Series& a, const Series& b) {
    int n = merged_order(a, b);
    Series r(n, merged_label(a, b));
    for (int k = 0; k <= n; ++k) {
      T acc = Ops::zero();
      for (int i = 0; i <= k; ++i) acc += a.c_[i] * b.c_[k - i];
      r.c_[k] = acc;
    }
    return r;
  }
  // a / b, requires b(0) != 0.
  friend Series operator/(const Series& a, const Series& b) {
    if (Ops::is_zero(b.c_[0]))
      throw std::invalid_argument("Series: division by series with zero constant term");
    int n = merged_order(a, b);
    Series r(n, merged_label(a, b));
    for (int k = 0; k <= n; ++k) {
      T acc = a.c_[k];
      for (int i = 0; i < k; ++i) acc -= r.c_[i] * b.c_[k - i];
      r.c_[k] = acc / b.c_[0];
    }
    return r;
  }

  Series scaled(const T& s) const {
    Series r(order(), label_);
    for (int k = 0; k <= order(); ++k) r.c_[k] = c_[k] * s;
    return r;
  }

  // log(a), requires a(0) = 1.
  Series log() const {
    if (!(c_[0] == Ops::one()))
      throw std::invalid_argument("Series::log requires constant term 1");
    int n = order();
    Series r(n, label_);
    for (int k = 1; k <= n; ++k) {
      T acc = c_[k];
      for (int i = 1; i < k; ++i)
        acc -= Ops::div_int(Ops::from_int(i) * r.c_[i] * c_[k - i], k);
      r.c_[k] = acc;
    }
    return r;
  }

  // exp(a), requires a(0) = 0.
  Series exp() const {
    if (!Ops::is_zero(c_[0]))
      throw std::invalid_argument("Series::exp requires constant term 0");
    int n = order();
    Series r(n, label_);
    r.c_[0] = Ops::one();
    for (int k = 1; k <= n; ++k) {
      T acc = Ops::zero();
      for (int i = 1; i <= k; ++i) acc += Ops::from_int(i) * c_[i] * r.c_[k - i];
      r.c_[k] = Ops::div_int(acc, k);
    }
    return r;
  }

  // sqrt(a), requires a(0) = 1.
  Series sqrt() const {
    if (!(c_[0] == Ops::one()))
      throw std::invalid_argument("Series::sqrt requires constant term 1");
    int n = order();
    Series r(n, label_);
    r.c_[0] = Ops::one();
    for (int k = 1; k <= n; ++k) {
      T acc = c_[k];
      for (int i = 1; i < k; ++i) acc -= r.c_[i] * r.c_[k - i];
      r.c_[k] = Ops::div_int(acc, 2);
    }
    return r;
  }

  Series derivative() const {
    if (order() == 0) return Series(0, label_);
    Series r(order() - 1, label_);
    for (int k = 1; k <= order(); ++k) r.c_[k - 1] = Ops::from_int(k) * c_[k];
    return r;
  }

  Series pow(int m) const {
    if (m < 0) throw std::invalid_argument("Series::pow: negative exponent");
    Series r = constant(Ops::one(), order(), label_);
    for (int i = 0; i < m; ++i) r = r * *this;
    return r;
  }

  // outer(inner), requires inner(0) = 0. Result is a series in inner's variable.
  friend Series compose(const Series& outer, const Series& inner) {
    if (!Ops::is_zero(inner.c_[0]))
      throw std::invalid_argument("Series compose: inner constant term must be 0");
    int n = std::min(outer.order(), inner.order());
    Series inn = inner.truncated(n);
    Series r = constant(outer.c_[outer.order() <= n ? outer.order() : n], n, inner.label_);
    for (int k = std::min(outer.order(), n) - 1; k >= 0; --k) {
      r = r * inn;
      r.c_[0] += outer.c_[k];
    }
    return r;
  }

  // Compositional inverse by Newton iteration with order doubling: returns g
  // with a(g(y)) = y to the truncation order. Requires a(0) = 0, a'(0) != 0.
  Series revert(std::string new_label = {}) const {
    if (!Ops::is_zero(c_[0]))
      throw std::invalid_argument("Series::revert requires zero constant term");
    if (order() < 1 || Ops::is_zero(c_[1]))
      throw std::invalid_argument("Series::revert requires nonzero linear coefficient");
    int n = order();
    if (new_label.empty()) new_label = label_.empty() ? std::string() : label_ + "~";
    // g at order 1
    Series g(std::vector<T>{Ops::zero(), Ops::one() / c_[1]}, new_label);
    int cur = 1;
    while (cur < n) {
      cur = std::min(2 * cur, n);
      Series gk = g.extended(cur);
      Series a = truncated(cur).with_label(label_);
      Series fg = compose(a, gk);                       // a(g)
      Series resid = fg - Series::identity(cur, new_label);
      Series fpg = compose(a.derivative().extended(cur), gk);  // a'(g)
      g = gk - resid / fpg;
    }
    return g;
  }

  double eval(double x) const
    requires std::is_same_v<T, double>
  {
    double acc = 0.0;
    for (int k = order(); k >= 0; --k) acc = acc * x + c_[k];
    return acc;
  }

 private:
  static int merged_order(const Series& a, const Series& b) {
    if (a.order() != b.order()) {
      auto& d = series_diagnostics();
      ++d.truncation_events;
      d.last_lhs_order = a.order();
      d.last_rhs_order = b.order();
    }
    return std::min(a.order(), b.order());
  }
  static std::string merged_label(const Series& a, const Series& b) {
    if (a.label_.empty()) return b.label_;
    if (b.label_.empty()) return a.label_;
    if (a.label_ != b.label_)
      throw std::invalid_argument("Series: variable label mismatch (" + a.label_ +
                                  " vs " + b.label_ + ")");
    return a.label_;
  }

  std::vector<T> c_;
  std::string label_;
};

using DSeries = Series<double>;
using QSeries = Series<Rational>;

// Truncated bivariate series: coefficient (j, k) multiplies x^j y^k on the
// rectangle j <= nx, k <= ny.
template <class T>
class BiSeries {
 public:
  using Ops = detail::ScalarOps<T>;

  BiSeries() : nx_(0), ny_(0), c_(1, Ops::zero()) {}
  BiSeries(int nx, int ny, std::string xlabel = {}, std::string ylabel = {})
      : nx_(nx), ny_(ny), c_((nx + 1) * (ny + 1), Ops::zero()),
        xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {
    if (nx < 0 || ny < 0) throw std::invalid_argument("BiSeries: negative order");
  }

  int x_order() const { return nx_; }
  int y_order() const { return ny_; }
  const std::string& x_label() const { return xlabel_; }
  const std::string& y_label() const { return ylabel_; }

  const T& at(int j, int k) const { return c_.at(idx(j, k)); }
  void set(int j, int k, const T& v) { c_.at(idx(j, k)) = v; }

  // Row j as a series in y; column k as a series in x.
  Series<T> row(int j) const {
    Series<T> s(ny_, ylabel_);
    for (int k = 0; k <= ny_; ++k) s.set(k, at(j, k));
    return s;
  }
  Series<T> column(int k) const {
    Series<T> s(nx_, xlabel_);
    for (int j = 0; j <= nx_; ++j) s.set(j, at(j, k));
    return s;
  }

  // d/dy: coefficient (j,k) of the result is (k+1) * c(j,k+1).
  BiSeries d_y() const {
    BiSeries r(nx_, ny_ > 0 ? ny_ - 1 : 0, xlabel_, ylabel_);
    for (int j = 0; j <= nx_; ++j)
      for (int k = 0; k + 1 <= ny_; ++k)
        r.set(j, k, Ops::from_int(k + 1) * at(j, k + 1));
    return r;
  }

  // Substitute x = xs(t), y = ys(t); both must vanish at 0. Returns a series
  // in t, complete through order min(xs.order, ys.order, nx_ + ny_ considered
  // jointly with the requested order).
  Series<T> compose_both(const Series<T>& xs, const Series<T>& ys, int out_order) const {
    if (!Ops::is_zero(xs[0]) || !Ops::is_zero(ys[0]))
      throw std::invalid_argument("BiSeries::compose_both: inner series must vanish at 0");
    int n = std::min({out_order, xs.order(), ys.order()});
    std::vector<Series<T>> xp(nx_ + 1), yp(ny_ + 1);
    xp[0] = Series<T>::constant(Ops::one(), n, xs.label());
    yp[0] = Series<T>::constant(Ops::one(), n, ys.label());
    for (int j = 1; j <= nx_; ++j) xp[j] = xp[j - 1] * xs.truncated(n);
    for (int k = 1; k <= ny_; ++k) yp[k] = yp[k - 1] * ys.truncated(n);
    Series<T> acc(n, xs.label());
    for (int j = 0; j <= nx_; ++j)
      for (int k = 0; k <= ny_; ++k) {
        if (Ops::is_zero(at(j, k))) continue;
        acc = acc + (xp[j] * yp[k]).scaled(at(j, k));
      }
    return acc;
  }

 private:
  int idx(int j, int k) const {
    if (j < 0 || j > nx_ || k < 0 || k > ny_)
      throw std::out_of_range("BiSeries: index out of range");
    return j * (ny_ + 1) + k;
  }
  int nx_, ny_;
  std::vector<T> c_;
  std::string xlabel_, ylabel_;
};

using DBiSeries = BiSeries<double>;

}  // namespace cda
