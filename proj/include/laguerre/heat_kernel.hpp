#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/special_functions.hpp"

namespace laguerre {

/// A real number stored as mantissa * exp(log_scale), so kernel values deep in
/// the Gaussian tail keep their relative precision.
struct LogScaled {
  double mantissa = 0;
  double log_scale = 0;

  double value() const { return mantissa == 0 ? 0.0 : mantissa * std::exp(log_scale); }
  double log_abs() const {
    return mantissa == 0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(mantissa)) + log_scale;
  }
};

/// Time-dependent coefficients of the Mehler-type closed form, r = e^{-4t}.
struct HeatTimeFactors {
  double t;
  double alpha;   // 2r/(1-r)
  double beta;    // 2 sqrt(r)/(1-r) = 1/sinh(2t)
  double coth2t;  // (1+r)/(1-r)
  double tanh_t;  // (1-sqrt r)/(1+sqrt r)

  explicit HeatTimeFactors(double time) : t(time) {
    if (!(time > 0) || !std::isfinite(time)) throw DomainError("heat kernel: t must be a positive finite number");
    alpha = 2.0 / std::expm1(4.0 * time);
    beta = 1.0 / std::sinh(2.0 * time);
    coth2t = 1.0 / std::tanh(2.0 * time);
    tanh_t = std::tanh(time);
  }
  /// Argument of the Bessel factor for the pair (x, y).
  double bessel_argument(double x, double y) const { return beta * (x * y); }
  /// Order-independent part of log p_t: log[beta sqrt(xy)] - coth(2t)(x-y)^2/2 - tanh(t) xy.
  double log_common(double x, double y) const {
    const double d = x - y;
    return std::log(beta) + 0.5 * std::log(x * y) - 0.5 * coth2t * d * d - tanh_t * (x * y);
  }
};

namespace detail {
inline void check_point_pair(double x, double y) {
  if (!(x > 0) || !(y > 0)) throw DomainError("heat kernel: coordinates must be > 0");
}
inline void check_dims(const MultiOrder& order, std::span<const double> x, std::span<const double> y) {
  if (x.size() != order.dim() || y.size() != order.dim()) throw UsageError("heat kernel: dimension mismatch");
}
}  // namespace detail

/// One-dimensional heat kernel in factored form, p = exp(log_scale) * e^{-z} I_nu(z).
inline LogScaled kernel_1d_scaled(double nu, const HeatTimeFactors& f, double x, double y) {
  detail::check_point_pair(x, y);
  return {scaled_bessel_i(nu, f.bessel_argument(x, y)), f.log_common(x, y)};
}

inline double kernel_1d_closed(double nu, double t, double x, double y) {
  if (nu < -0.5) throw DomainError("kernel_1d_closed: order must be >= -1/2");
  return kernel_1d_scaled(nu, HeatTimeFactors(t), x, y).value();
}

/// Unfactored form 2 sqrt(r x y)/(1-r) exp(-(1+r)(x^2+y^2)/(2(1-r))) I_nu(z).
/// Overflows once z exceeds ~700; kept as an independent cross-check only.
inline double kernel_1d_raw(double nu, double t, double x, double y) {
  detail::check_point_pair(x, y);
  const HeatTimeFactors f(t);
  const double z = f.bessel_argument(x, y);
  const double bessel = scaled_bessel_i(nu, z) * std::exp(z);
  return f.beta * std::sqrt(x * y) * std::exp(-0.5 * f.coth2t * (x * x + y * y)) * bessel;
}

inline LogScaled kernel_nd_scaled(const MultiOrder& order, double t, std::span<const double> x,
                                  std::span<const double> y) {
  detail::check_dims(order, x, y);
  const HeatTimeFactors f(t);
  LogScaled out{1.0, 0.0};
  for (std::size_t j = 0; j < x.size(); ++j) {
    const LogScaled a = kernel_1d_scaled(order[j], f, x[j], y[j]);
    out.mantissa *= a.mantissa;
    out.log_scale += a.log_scale;
  }
  return out;
}

/// p_t^nu(x, y) on R^n_+ as the product of one-dimensional kernels.
inline double kernel_nd(const MultiOrder& order, double t, std::span<const double> x, std::span<const double> y) {
  return kernel_nd_scaled(order, t, x, y).value();
}

struct SpectralKernelSum {
  double value = 0;
  /// Geometric extrapolation of the last shell with ratio e^{-4t}; a heuristic,
  /// not a rigorous bound.
  double tail_estimate = 0;
  int k_max = 0;
};

/// Truncated eigen-expansion sum_{|k| <= k_max} e^{-t lambda_k} phi_k(x) phi_k(y).
inline SpectralKernelSum kernel_spectral_sum(const MultiOrder& order, double t, std::span<const double> x,
                                             std::span<const double> y, int k_max) {
  detail::check_dims(order, x, y);
  if (!(t > 0)) throw DomainError("kernel_spectral: t must be > 0");
  if (k_max < 0 || k_max > 200) throw UsageError("kernel_spectral: k_max must lie in [0, 200]");
  const double q = std::exp(-4.0 * t);
  // shell[d] = sum over |k| = d of q^d prod_j phi_{k_j}(x_j) phi_{k_j}(y_j), by convolution across axes.
  std::vector<double> shell(k_max + 1, 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto px = laguerre_functions_upto(k_max, order[j], x[j]);
    const auto py = laguerre_functions_upto(k_max, order[j], y[j]);
    std::vector<double> axis(k_max + 1);
    double qd = 1.0;
    for (int d = 0; d <= k_max; ++d, qd *= q) axis[d] = qd * px[d] * py[d];
    if (j == 0) {
      shell = axis;
      continue;
    }
    std::vector<double> next(k_max + 1, 0.0);
    for (int d = 0; d <= k_max; ++d)
      for (int e = 0; e <= d; ++e) next[d] += shell[e] * axis[d - e];
    shell.swap(next);
  }
  const double ground = std::exp(-t * order.eigenvalue(0));
  SpectralKernelSum out;
  out.k_max = k_max;
  for (double s : shell) out.value += s;
  out.value *= ground;
  double last = std::fabs(shell[k_max]);
  if (k_max > 0) last = std::max(last, std::fabs(shell[k_max - 1]) * q);
  out.tail_estimate = ground * last * q / (1.0 - q);
  return out;
}

inline double kernel_spectral(const MultiOrder& order, double t, std::span<const double> x,
                              std::span<const double> y, int k_max) {
  return kernel_spectral_sum(order, t, x, y, k_max).value;
}

}  // namespace laguerre
