#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "laguerre/errors.hpp"

namespace laguerre {

/// Order vector nu in [-1/2, inf)^n of a Laguerre operator, with the derived
/// quantities every estimate is phrased in.
class MultiOrder {
 public:
  MultiOrder() : nu_{-0.5} {}
  explicit MultiOrder(std::vector<double> nu) : nu_(std::move(nu)) {
    if (nu_.empty()) throw UsageError("MultiOrder: dimension must be >= 1");
    for (std::size_t j = 0; j < nu_.size(); ++j) {
      if (!std::isfinite(nu_[j]) || nu_[j] < -0.5)
        throw DomainError("MultiOrder: component " + std::to_string(j) +
                          " must be finite and >= -1/2");
    }
  }
  static MultiOrder uniform(std::size_t n, double v) {
    return MultiOrder(std::vector<double>(n, v));
  }

  std::size_t dim() const { return nu_.size(); }
  double operator[](std::size_t j) const { return nu_[j]; }
  const std::vector<double>& components() const { return nu_; }

  /// Axis j belongs to the "active" set (nu_j > -1/2), where the operator has
  /// a genuine inverse-square potential and rho feels the distance to x_j = 0.
  bool is_active(std::size_t j) const { return nu_[j] > -0.5; }
  std::vector<std::size_t> active_axes() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < dim(); ++j)
      if (is_active(j)) out.push_back(j);
    return out;
  }
  /// Smallest active component; +inf when no axis is active.
  double nu_min() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dim(); ++j)
      if (is_active(j)) m = std::min(m, nu_[j]);
    return m;
  }
  /// Decay exponent nu_min + 1/2 (may be +inf).
  double decay_exponent() const { return nu_min() + 0.5; }
  /// Hoelder exponent of the Riesz kernels, min(1, nu_min + 1/2).
  double smoothness_exponent() const { return std::min(1.0, decay_exponent()); }
  double sum() const {
    double s = 0;
    for (double v : nu_) s += v;
    return s;
  }
  /// 4|k| + 2|nu| + 2n.
  double eigenvalue(long total_degree) const {
    return 4.0 * double(total_degree) + 2.0 * sum() + 2.0 * double(dim());
  }
  MultiOrder shifted(std::span<const int> by) const {
    if (by.size() != dim()) throw UsageError("MultiOrder::shifted: dimension mismatch");
    std::vector<double> v = nu_;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += by[j];
    return MultiOrder(std::move(v));
  }
  bool operator==(const MultiOrder&) const = default;

 private:
  std::vector<double> nu_;
};

struct ScaledBesselValue {
  double order = 0;
  double argument = 0;
  double scaled_value = 0;  // e^{-z} I_order(z)
};

/// ln Gamma(x) for x > 0. The C library version is accurate to a few ulp,
/// which is all the normalizations below need.
inline double log_gamma(double x) {
  if (!(x > 0)) throw DomainError("log_gamma: argument must be positive");
  return std::lgamma(x);
}

namespace detail {

// Power series of e^{-z} I_a(z). All terms are positive, so the sum is
// accurate at any z; the only loss is in the final exp, ~ z * eps relative.
inline double bessel_i_scaled_series(double a, double z) {
  const double q = 0.25 * z * z;
  double term = 1.0, sum = 1.0, log_shift = 0.0;
  for (long k = 1; k < 10'000'000; ++k) {
    term *= q / (double(k) * (a + double(k)));
    sum += term;
    if (term <= sum * 1e-17) break;
    if (sum > 1e250) {
      sum *= 1e-250;
      term *= 1e-250;
      log_shift += 250.0 * std::numbers::ln10;
    }
  }
  return std::exp(a * std::log(0.5 * z) - z - std::lgamma(a + 1.0) + log_shift +
                  std::log(sum));
}

// Hankel expansion e^{-z} I_a(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(a) / z^k.
// Returns false if the terms start growing before reaching full precision.
inline bool bessel_i_scaled_asymptotic(double a, double z, double& out) {
  const double mu = 4.0 * a * a;
  double term = 1.0, sum = 1.0, prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * z);
    const double mag = std::fabs(term);
    if (mag == 0.0) break;  // half-integer order: the expansion terminates
    if (mag >= prev) return false;
    sum += term;
    prev = mag;
    if (mag < 1e-17 * std::fabs(sum)) break;
  }
  out = sum / std::sqrt(2.0 * std::numbers::pi * z);
  return true;
}

inline void check_bessel_args(double alpha, double z) {
  if (!std::isfinite(alpha) || alpha <= -1.0)
    throw DomainError("bessel_i_scaled: order must be > -1");
  if (!(z >= 0.0) || std::isinf(z)) throw DomainError("bessel_i_scaled: argument must be >= 0");
}

}  // namespace detail

/// e^{-z} I_alpha(z) as a plain double.
inline double scaled_bessel_i(double alpha, double z) {
  detail::check_bessel_args(alpha, z);
  if (z == 0.0) {
    if (alpha == 0.0) return 1.0;
    return alpha > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  // Beyond z = 30 the exponentially small second Hankel branch is < e^{-60}.
  if (z > 30.0) {
    double v;
    if (detail::bessel_i_scaled_asymptotic(alpha, z, v)) return v;
  }
  return detail::bessel_i_scaled_series(alpha, z);
}

inline ScaledBesselValue bessel_i_scaled(double alpha, double z) {
  return {alpha, z, scaled_bessel_i(alpha, z)};
}

/// Generalized Laguerre polynomial L_k^alpha(x) by the forward three-term
/// recurrence.
inline double laguerre_polynomial(int k, double alpha, double x) {
  if (k < 0) throw UsageError("laguerre_polynomial: degree must be >= 0");
  if (k == 0) return 1.0;
  double prev = 1.0, cur = 1.0 + alpha - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// One-dimensional Laguerre function
///   phi_k^nu(x) = sqrt(2 Gamma(k+1)/Gamma(k+nu+1)) L_k^nu(x^2) x^{nu+1/2} e^{-x^2/2},
/// with the normalization and the power/Gaussian factor combined in log form.
inline double laguerre_function_1d(int k, double nu, double x) {
  if (!(x > 0.0)) throw DomainError("laguerre_function: coordinates must be > 0");
  if (nu < -0.5) throw DomainError("laguerre_function: order must be >= -1/2");
  const double poly = laguerre_polynomial(k, nu, x * x);
  if (poly == 0.0) return 0.0;
  const double log_mag = 0.5 * (std::numbers::ln2 + std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.0)) +
                         (nu + 0.5) * std::log(x) - 0.5 * x * x + std::log(std::fabs(poly));
  return std::copysign(std::exp(log_mag), poly);
}

/// phi_0^nu(x), ..., phi_kmax^nu(x) in one pass, using the recurrence for the
/// normalized functions directly (values stay O(1), rescaled if needed).
inline std::vector<double> laguerre_functions_upto(int kmax, double nu, double x) {
  if (kmax < 0) throw UsageError("laguerre_functions_upto: kmax must be >= 0");
  if (!(x > 0.0)) throw DomainError("laguerre_function: coordinates must be > 0");
  const double u = x * x;
  double log_scale = 0.5 * std::numbers::ln2 + (nu + 0.5) * std::log(x) - 0.5 * u -
                     0.5 * std::lgamma(nu + 1.0);
  std::vector<double> raw(kmax + 1);
  std::vector<double> shift(kmax + 1, 0.0);
  double prev = 0.0, cur = 1.0, acc = 0.0;
  raw[0] = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    const double a = (2.0 * k - 1.0 + nu - u) / std::sqrt(k * (k + nu));
    const double b = std::sqrt((k - 1.0) * (k - 1.0 + nu) / (k * (k + nu)));
    double next = a * cur - b * prev;
    prev = cur;
    cur = next;
    if (std::fabs(cur) > 1e200) {
      cur *= 1e-200;
      prev *= 1e-200;
      acc += 200.0 * std::numbers::ln10;
    }
    raw[k] = cur;
    shift[k] = acc;
  }
  std::vector<double> out(kmax + 1);
  for (int k = 0; k <= kmax; ++k)
    out[k] = raw[k] == 0.0 ? 0.0
                           : std::copysign(std::exp(log_scale + shift[k] + std::log(std::fabs(raw[k]))),
                                           raw[k]);
  return out;
}

/// Tensor-product Laguerre function phi_k^nu(x) on R^n_+.
inline double laguerre_function(std::span<const int> k, const MultiOrder& order,
                                std::span<const double> x) {
  if (k.size() != order.dim() || x.size() != order.dim())
    throw UsageError("laguerre_function: dimension mismatch");
  double v = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) v *= laguerre_function_1d(k[j], order[j], x[j]);
  return v;
}

}  // namespace laguerre
