#pragma once

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "laguerre/heat_kernel.hpp"

namespace laguerre {

/// Elementary one-axis operators acting on a heat kernel in (x, y).
///   Delta      d/dx + x - (nu + 1/2)/x
///   DeltaStar -d/dx + x - (nu + 1/2)/x
///   Laguerre   DeltaStar Delta + 2(nu + 1)
///   Dx, Dy     plain partial derivatives; MulX multiplies by x.
enum class AxisOp { Delta, DeltaStar, Laguerre, Dx, Dy, MulX };

/// Exact expansion of W p_t^{mu}(x, y) for a word W of AxisOps, as a sum of
///   c * alpha^i * beta^j * x^a * y^b * p_t^{mu + j}
/// with alpha = 2r/(1-r), beta = 2 sqrt(r)/(1-r). The operator order
/// (`op_nu`) and the order of the kernel it acts on (`op_nu + shift`) may
/// differ, which is what the shifted dual estimates need.
class AxisExpansion {
 public:
  struct Key {
    int i, j, a, b;
    auto operator<=>(const Key&) const = default;
  };

  AxisExpansion(double op_nu, int shift = 0) : op_nu_(op_nu), shift_(shift) { terms_[{0, 0, 0, 0}] = 1.0; }

  AxisExpansion& apply(AxisOp op) {
    if (op == AxisOp::Laguerre) {
      AxisExpansion inner = *this;
      inner.apply(AxisOp::Delta).apply(AxisOp::DeltaStar);
      for (auto& [k, c] : terms_) c *= 2.0 * (op_nu_ + 1.0);
      for (const auto& [k, c] : inner.terms_) add(terms_, k, c);
      prune();
      return *this;
    }
    std::map<Key, double> out;
    for (const auto& [k, c] : terms_) {
      const int ms = shift_ + k.j;  // mu - op_nu, an integer
      const double mu = op_nu_ + ms;
      switch (op) {
        case AxisOp::Dx:
          add(out, {k.i, k.j, k.a - 1, k.b}, c * (k.a + mu + 0.5));
          add(out, {k.i, k.j, k.a + 1, k.b}, -c);
          add(out, {k.i + 1, k.j, k.a + 1, k.b}, -c);
          add(out, {k.i, k.j + 1, k.a, k.b + 1}, c);
          break;
        case AxisOp::Dy:
          add(out, {k.i, k.j, k.a, k.b - 1}, c * (k.b + mu + 0.5));
          add(out, {k.i, k.j, k.a, k.b + 1}, -c);
          add(out, {k.i + 1, k.j, k.a, k.b + 1}, -c);
          add(out, {k.i, k.j + 1, k.a + 1, k.b}, c);
          break;
        case AxisOp::Delta:
          add(out, {k.i, k.j, k.a - 1, k.b}, c * double(k.a + ms));
          add(out, {k.i + 1, k.j, k.a + 1, k.b}, -c);
          add(out, {k.i, k.j + 1, k.a, k.b + 1}, c);
          break;
        case AxisOp::DeltaStar:
          add(out, {k.i, k.j, k.a - 1, k.b}, -c * (k.a + ms + 2.0 * op_nu_ + 1.0));
          add(out, {k.i, k.j, k.a + 1, k.b}, 2.0 * c);
          add(out, {k.i + 1, k.j, k.a + 1, k.b}, c);
          add(out, {k.i, k.j + 1, k.a, k.b + 1}, -c);
          break;
        case AxisOp::MulX:
          add(out, {k.i, k.j, k.a + 1, k.b}, c);
          break;
        case AxisOp::Laguerre:
          break;
      }
    }
    terms_.swap(out);
    prune();
    return *this;
  }

  AxisExpansion& apply(std::span<const AxisOp> word) {
    for (AxisOp op : word) apply(op);
    return *this;
  }

  /// Value scaled by the order-independent factor of the kernel; the
  /// log_scale is the same for every expansion at a given (t, x, y).
  /// `magnitude`, if given, receives the sum of |terms| on the same scale,
  /// which bounds the rounding error of the cancelling sum.
  LogScaled evaluate(const HeatTimeFactors& f, double x, double y, double* magnitude = nullptr) const {
    detail::check_point_pair(x, y);
    const double z = f.bessel_argument(x, y);
    std::vector<double> bessel(max_shift_ + 1);
    for (int j = 0; j <= max_shift_; ++j) bessel[j] = scaled_bessel_i(op_nu_ + shift_ + j, z);
    double sum = 0, mag = 0;
    for (const auto& [k, c] : terms_) {
      if (bessel[k.j] == 0.0) continue;
      const double v =
          c * bessel[k.j] * std::pow(f.alpha, k.i) * std::pow(f.beta, k.j) * std::pow(x, k.a) * std::pow(y, k.b);
      sum += v;
      mag += std::fabs(v);
    }
    if (magnitude) *magnitude = mag;
    return {sum, f.log_common(x, y)};
  }

  const std::map<Key, double>& terms() const { return terms_; }
  double operator_order() const { return op_nu_; }
  int order_shift() const { return shift_; }

 private:
  static void add(std::map<Key, double>& m, Key k, double c) {
    if (c != 0.0) m[k] += c;
  }
  void prune() {
    max_shift_ = 0;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->second == 0.0) {
        it = terms_.erase(it);
      } else {
        max_shift_ = std::max(max_shift_, it->first.j);
        ++it;
      }
    }
  }

  double op_nu_;
  int shift_;
  int max_shift_ = 0;
  std::map<Key, double> terms_;
};

/// A linear combination of tensor products of one-axis expansions acting on
/// p_t^{nu + shift}. Built once, then evaluated read-only (thread-safe).
class KernelOperator {
 public:
  struct Product {
    double coefficient;
    std::vector<AxisExpansion> axes;
  };

  KernelOperator(const MultiOrder& order, std::vector<int> shift = {}) : order_(order), shift_(std::move(shift)) {
    if (shift_.empty()) shift_.assign(order.dim(), 0);
    if (shift_.size() != order.dim()) throw UsageError("KernelOperator: shift dimension mismatch");
  }

  /// Adds coefficient * prod_j word_j; the first op of each word acts first.
  KernelOperator& add_product(double coefficient, const std::vector<std::vector<AxisOp>>& words) {
    if (words.size() != order_.dim()) throw UsageError("KernelOperator: one word per axis required");
    Product p{coefficient, {}};
    for (std::size_t j = 0; j < words.size(); ++j) {
      AxisExpansion e(order_[j], shift_[j]);
      e.apply(words[j]);
      p.axes.push_back(std::move(e));
    }
    products_.push_back(std::move(p));
    return *this;
  }

  /// `magnitude` as in AxisExpansion::evaluate, relative to the returned scale.
  LogScaled evaluate(double t, std::span<const double> x, std::span<const double> y,
                     double* magnitude = nullptr) const {
    detail::check_dims(order_, x, y);
    const HeatTimeFactors f(t);
    LogScaled out{0.0, 0.0};
    double mag = 0;
    bool first = true;
    for (const auto& p : products_) {
      double m = p.coefficient, am = std::fabs(p.coefficient);
      double scale = 0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        double axis_mag = 0;
        const LogScaled a = p.axes[j].evaluate(f, x[j], y[j], &axis_mag);
        m *= a.mantissa;
        am *= axis_mag;
        scale += a.log_scale;
      }
      if (first) out.log_scale = scale, first = false;
      out.mantissa += m;  // every product shares the same scale
      mag += am;
    }
    if (magnitude) *magnitude = mag;
    return out;
  }
  double value(double t, std::span<const double> x, std::span<const double> y) const {
    return evaluate(t, x, y).value();
  }

  const MultiOrder& order() const { return order_; }

  /// delta^m, i.e. prod_j Delta_{nu_j}^{m_j}.
  static KernelOperator delta_power(const MultiOrder& order, std::span<const int> m) {
    check_index(order, m);
    std::vector<std::vector<AxisOp>> w(order.dim());
    for (std::size_t j = 0; j < w.size(); ++j) w[j].assign(m[j], AxisOp::Delta);
    return KernelOperator(order).add_product(1.0, w);
  }

  /// L^power (delta^*)^k acting on p^{nu + shift}; L = sum_j L_j expands
  /// multinomially.
  static KernelOperator laguerre_dual_power(const MultiOrder& order, int power, std::span<const int> k,
                                            std::vector<int> shift) {
    check_index(order, k);
    KernelOperator op(order, std::move(shift));
    const std::size_t n = order.dim();
    std::vector<int> parts(n, 0);
    // enumerate compositions of `power` into n parts
    auto rec = [&](auto&& self, std::size_t axis, int left, double multinom) -> void {
      if (axis + 1 == n) {
        parts[axis] = left;
        double coef = multinom;
        for (int i = 1; i <= left; ++i) coef /= i;
        std::vector<std::vector<AxisOp>> w(n);
        for (std::size_t j = 0; j < n; ++j) {
          w[j].assign(k[j], AxisOp::DeltaStar);
          w[j].insert(w[j].end(), parts[j], AxisOp::Laguerre);
        }
        op.add_product(coef, w);
        return;
      }
      for (int a = 0; a <= left; ++a) {
        parts[axis] = a;
        double c = multinom;
        for (int i = 1; i <= a; ++i) c /= i;
        self(self, axis + 1, left - a, c);
      }
    };
    double fact = 1;
    for (int i = 2; i <= power; ++i) fact *= i;
    rec(rec, 0, power, fact);
    return op;
  }

 private:
  static void check_index(const MultiOrder& order, std::span<const int> m) {
    if (m.size() != order.dim()) throw UsageError("derivative multi-index: dimension mismatch");
    for (int v : m)
      if (v < 0) throw UsageError("derivative multi-index: entries must be >= 0");
  }

  MultiOrder order_;
  std::vector<int> shift_;
  std::vector<Product> products_;
};

/// delta_nu^m p_t^nu(x, y).
inline double delta_kernel(const MultiOrder& order, std::span<const int> m, double t, std::span<const double> x,
                           std::span<const double> y) {
  return KernelOperator::delta_power(order, m).value(t, x, y);
}

/// A kernel value together with the data that produced it.
struct KernelEvaluation {
  double t = 0;
  std::vector<double> x, y;
  MultiOrder order;
  std::vector<int> derivative;
  double value = 0;
};

inline KernelEvaluation evaluate_delta_kernel(const MultiOrder& order, std::vector<int> m, double t,
                                              std::vector<double> x, std::vector<double> y) {
  KernelEvaluation e{t, std::move(x), std::move(y), order, std::move(m), 0.0};
  e.value = delta_kernel(order, e.derivative, t, e.x, e.y);
  return e;
}

}  // namespace laguerre
