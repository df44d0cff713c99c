#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <tuple>
#include <memory>
#include <string>
#include <vector>

#include "laguerre/bound_fit.hpp"
#include "laguerre/critical_function.hpp"
#include "laguerre/delta_kernel.hpp"

namespace laguerre {

/// Decay power used in place of nu + 1/2 at the Hermite endpoint, where the
/// estimates hold for every power.
inline constexpr double hermite_decay_power = 4.0;

namespace detail {

inline double log_abs_value(const LogScaled& v) { return v.log_abs(); }

inline std::string order_tag(const MultiOrder& order) {
  std::string s = "nu=";
  for (std::size_t j = 0; j < order.dim(); ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%g", j ? "," : "", order[j]);
    s += buf;
  }
  return s;
}

/// log of the critical-weight factor (1 + sqrt t/rho(x) + sqrt t/rho(y))^{-gamma}.
inline double log_weight(const MultiOrder& order, double gamma, const Sample& s) {
  return -gamma * log_critical_weight(order, std::sqrt(s.t), s.x, s.y);
}

inline std::vector<std::vector<AxisOp>> words(std::size_t n) { return std::vector<std::vector<AxisOp>>(n); }

inline void append(std::vector<AxisOp>& w, AxisOp op, int count) { w.insert(w.end(), std::max(count, 0), op); }

inline std::shared_ptr<KernelOperator> single(const MultiOrder& order, const std::vector<std::vector<AxisOp>>& w,
                                              std::vector<int> shift = {}) {
  auto op = std::make_shared<KernelOperator>(order, std::move(shift));
  op->add_product(1.0, w);
  return op;
}

inline BoundFamily kernel_family(std::string id, std::string description, double gamma,
                                 std::shared_ptr<KernelOperator> op, std::function<double(const Sample&)> log_rhs,
                                 std::function<bool(const Sample&)> admissible = {}, double lhs_log_shift_t = 0) {
  BoundFamily f;
  f.id = std::move(id);
  f.description = std::move(description);
  f.exponent_gamma = gamma;
  f.gaussian = true;
  f.log_lhs = [op, lhs_log_shift_t](const Sample& s) {
    return op->evaluate(s.t, s.x, s.y).log_abs() + lhs_log_shift_t * std::log(s.t);
  };
  f.log_rhs_base = std::move(log_rhs);
  f.admissible = std::move(admissible);
  return f;
}

}  // namespace detail

/// Every Gaussian bound family for p_t^nu and its derivatives that applies to
/// `order`: the Hermite-endpoint families (1-D, nu = -1/2), the nu > -1/2
/// families (1-D), or the product families (n >= 2). Each family fixes a few
/// small derivative orders.
inline std::vector<BoundFamily> heat_kernel_families(const MultiOrder& order) {
  using detail::append;
  using detail::log_weight;
  using detail::words;
  const std::size_t n = order.dim();
  const std::string tag = detail::order_tag(order);
  std::vector<BoundFamily> out;
  auto id = [&](const std::string& base, const std::string& params) {
    return base + "[" + tag + (params.empty() ? "" : ";" + params) + "]";
  };

  if (n == 1 && !order.is_active(0)) {
    const double N = hermite_decay_power;
    for (auto [l, k] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{2, 1}}) {
      auto w = words(1);
      append(w[0], AxisOp::Dx, k);
      append(w[0], AxisOp::MulX, l);
      out.push_back(detail::kernel_family(
          id("heat.hermite.moment_derivative", "l=" + std::to_string(l) + ";k=" + std::to_string(k)),
          "|x^l d^k p| <= C e^{-t/4} t^{-(l+k+1)/2} G_c W^{-N}", N, detail::single(order, w),
          [=](const Sample& s) { return -s.t / 4 - 0.5 * (l + k + 1) * std::log(s.t) + log_weight(order, N, s); }));
    }
    for (int k : {1, 2}) {
      auto w = words(1);
      append(w[0], AxisOp::Delta, k);
      out.push_back(detail::kernel_family(
          id("heat.hermite.delta", "k=" + std::to_string(k)), "|delta^k p| <= C t^{-(k+1)/2} G_c W^{-N}", N,
          detail::single(order, w),
          [=](const Sample& s) { return -0.5 * (k + 1) * std::log(s.t) + log_weight(order, N, s); }));
    }
    for (auto [k, j] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{2, 1}}) {
      auto w = words(1);
      append(w[0], AxisOp::Delta, j);
      append(w[0], AxisOp::Dx, k);
      out.push_back(detail::kernel_family(
          id("heat.hermite.derivative_delta", "k=" + std::to_string(k) + ";j=" + std::to_string(j)),
          "|d^k delta^j p| <= C t^{-(j+k+1)/2} G_c W^{-N}", N, detail::single(order, w),
          [=](const Sample& s) { return -0.5 * (j + k + 1) * std::log(s.t) + log_weight(order, N, s); }));
    }
    for (auto [j, k] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{1, 1}}) {
      const std::vector<int> kk{k};
      out.push_back(detail::kernel_family(
          id("heat.hermite.dual", "m=" + std::to_string(j) + ";k=" + std::to_string(k)),
          "|L^m (delta*)^k p| <= C t^{-(k+2m+1)/2} G_c W^{-N}", N,
          std::make_shared<KernelOperator>(KernelOperator::laguerre_dual_power(order, j, kk, {0})),
          [=](const Sample& s) { return -0.5 * (k + 2 * j + 1) * std::log(s.t) + log_weight(order, N, s); }));
    }
    return out;
  }

  if (n == 1) {
    const double g = order.decay_exponent();
    out.push_back(detail::kernel_family(
        id("heat.size", ""), "p <= C e^{-t/2} t^{-1/2} G_c W^{-(nu+1/2)}", g, detail::single(order, words(1)),
        [=](const Sample& s) { return -s.t / 2 - 0.5 * std::log(s.t) + log_weight(order, g, s); }));

    auto region_d = [](const Sample& s) {
      const double x = s.x[0], y = s.y[0];
      return s.t < 1 && (x * y < s.t || y < x / 2 || y > 2 * x);
    };
    for (auto [k, m] : {std::pair{0, 1}, std::pair{1, 1}, std::pair{2, 2}}) {
      auto w = words(1);
      append(w[0], AxisOp::Delta, m);
      append(w[0], AxisOp::MulX, k);
      out.push_back(detail::kernel_family(
          id("heat.moment_delta_short_time", "k=" + std::to_string(k) + ";m=" + std::to_string(m)),
          "|(x/sqrt t)^k delta^m p| <= C t^{-(m+1)/2} G_c W^{-(nu+1/2)} on D, t < 1", g, detail::single(order, w),
          [=](const Sample& s) { return -0.5 * (m + 1) * std::log(s.t) + log_weight(order, g, s); }, region_d,
          -0.5 * k));
    }
    for (auto [k, m] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 0}}) {
      auto w = words(1);
      append(w[0], AxisOp::Delta, m);
      append(w[0], AxisOp::MulX, k);
      out.push_back(detail::kernel_family(
          id("heat.moment_delta_long_time", "k=" + std::to_string(k) + ";m=" + std::to_string(m)),
          "|x^k delta^m p| <= C e^{-t/2^{m+2}} t^{-(m+1)/2} G_c W^{-(nu+1/2)}, t >= 1", g, detail::single(order, w),
          [=](const Sample& s) {
            return -s.t / std::pow(2.0, m + 2) - 0.5 * (m + 1) * std::log(s.t) + log_weight(order, g, s);
          },
          [](const Sample& s) { return s.t >= 1; }));
    }
    for (int m : {1, 2}) {
      auto w = words(1);
      append(w[0], AxisOp::Delta, m);
      auto top = detail::single(order, w);
      auto w1 = words(1);
      append(w1[0], AxisOp::Delta, m - 1);
      auto low = detail::single(order, w1, {0});
      auto low_shifted = detail::single(order, w1, {1});
      BoundFamily f;
      f.id = id("heat.near_diagonal", "m=" + std::to_string(m));
      f.description = "|delta^m p| + (x/t)|delta^{m-1}(p^nu - p^{nu+1})| <= C t^{-(m+1)/2} G_c W^{-(nu+1/2)}";
      f.exponent_gamma = g;
      f.log_lhs = [=](const Sample& s) {
        const LogScaled a = top->evaluate(s.t, s.x, s.y);
        const LogScaled b = low->evaluate(s.t, s.x, s.y), c = low_shifted->evaluate(s.t, s.x, s.y);
        // all three share the order-independent scale
        const double v = std::fabs(a.mantissa) + s.x[0] / s.t * std::fabs(b.mantissa - c.mantissa);
        return v == 0 ? -std::numeric_limits<double>::infinity() : std::log(v) + a.log_scale;
      };
      f.log_rhs_base = [=](const Sample& s) { return -0.5 * (m + 1) * std::log(s.t) + log_weight(order, g, s); };
      f.admissible = [](const Sample& s) {
        const double x = s.x[0], y = s.y[0];
        return s.t < 1 && x * y >= s.t && y >= x / 2 && y <= 2 * x;
      };
      out.push_back(std::move(f));
    }
    for (int k : {1, 2}) {
      auto w = words(1);
      append(w[0], AxisOp::Delta, k);
      out.push_back(detail::kernel_family(
          id("heat.delta", "k=" + std::to_string(k)), "|delta^k p| <= C t^{-(k+1)/2} G_c W^{-(nu+1/2)}", g,
          detail::single(order, w),
          [=](const Sample& s) { return -0.5 * (k + 1) * std::log(s.t) + log_weight(order, g, s); }));
    }
    for (auto [k, j] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{2, 0}}) {
      auto w = words(1);
      append(w[0], AxisOp::Delta, j);
      append(w[0], AxisOp::Dx, k);
      out.push_back(detail::kernel_family(
          id("heat.derivative_delta", "k=" + std::to_string(k) + ";j=" + std::to_string(j)),
          "|d^k delta^j p| <= C [rho(x)^{-k} + t^{-k/2}] t^{-(j+1)/2} G_c W^{-(nu+1/2)}", g, detail::single(order, w),
          [=](const Sample& s) {
            const double a = -k * std::log(rho(order, s.x)), b = -0.5 * k * std::log(s.t);
            const double hi = std::max(a, b);
            return hi + std::log1p(std::exp(std::min(a, b) - hi)) - 0.5 * (j + 1) * std::log(s.t) +
                   log_weight(order, g, s);
          }));
    }
    for (auto [m, k, l] : {std::tuple{0, 1, 1}, std::tuple{1, 0, 2}, std::tuple{1, 1, 3}}) {
      const std::vector<int> kk{k};
      out.push_back(detail::kernel_family(
          id("heat.shifted_dual", "m=" + std::to_string(m) + ";k=" + std::to_string(k) + ";l=" + std::to_string(l)),
          "|L^m (delta*)^k p^{nu+l}| <= C t^{-(k+2m+1)/2} G_c W^{-(nu+1/2)}, l >= k+2m", g,
          std::make_shared<KernelOperator>(KernelOperator::laguerre_dual_power(order, m, kk, {l})),
          [=](const Sample& s) { return -0.5 * (k + 2 * m + 1) * std::log(s.t) + log_weight(order, g, s); }));
    }
    return out;
  }

  // n >= 2: products of the one-dimensional estimates
  const double g = order.active_axes().empty() ? hermite_decay_power : order.decay_exponent();
  const double dn = double(n);
  auto key = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t j = 0; j < v.size(); ++j) s += (j ? "," : "") + std::to_string(v[j]);
    return s;
  };
  std::vector<std::vector<int>> deltas{std::vector<int>(n, 0), std::vector<int>(n, 0), std::vector<int>(n, 1)};
  deltas[1][0] = 1;
  for (const auto& l : deltas) {
    auto w = words(n);
    int total = 0;
    for (std::size_t j = 0; j < n; ++j) append(w[j], AxisOp::Delta, l[j]), total += l[j];
    out.push_back(detail::kernel_family(
        id("heat.nd.delta", "l=" + key(l)), "|delta^l p| <= C t^{-(n+|l|)/2} G_c W^{-(nu_min+1/2)}", g,
        detail::single(order, w),
        [=](const Sample& s) { return -0.5 * (dn + total) * std::log(s.t) + log_weight(order, g, s); }));
  }
  {
    // d_{x_1} delta^j with j = 0 and j = e_n
    for (int jn : {0, 1}) {
      auto w = words(n);
      append(w[n - 1], AxisOp::Delta, jn);
      append(w[0], AxisOp::Dx, 1);
      std::vector<int> kv(n, 0), jv(n, 0);
      kv[0] = 1;
      jv[n - 1] = jn;
      out.push_back(detail::kernel_family(
          id("heat.nd.derivative_delta", "k=" + key(kv) + ";j=" + key(jv)),
          "|d^k delta^j p| <= C [rho(x)^{-|k|} + t^{-|k|/2}] t^{-(|j|+n)/2} G_c W^{-(nu_min+1/2)}", g,
          detail::single(order, w), [=](const Sample& s) {
            const double a = -std::log(rho(order, s.x)), b = -0.5 * std::log(s.t);
            const double hi = std::max(a, b);
            return hi + std::log1p(std::exp(std::min(a, b) - hi)) - 0.5 * (jn + dn) * std::log(s.t) +
                   log_weight(order, g, s);
          }));
    }
  }
  for (auto [m, k0] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{1, 1}}) {
    std::vector<int> k(n, 0), shift(n, 0);
    k[0] = k0;
    for (std::size_t j = 0; j < n; ++j)
      if (order.is_active(j)) shift[j] = k[j] + 2 * m;  // the smallest admissible l, zero on Hermite axes
    const int total = k0;
    out.push_back(detail::kernel_family(
        id("heat.nd.shifted_dual", "m=" + std::to_string(m) + ";k=" + key(k) + ";l=" + key(shift)),
        "|L^m (delta*)^k p^{nu+l_nu}| <= C t^{-(|k|+2m+n)/2} G_c W^{-(nu_min+1/2)}", g,
        std::make_shared<KernelOperator>(KernelOperator::laguerre_dual_power(order, m, k, shift)),
        [=](const Sample& s) { return -0.5 * (total + 2 * m + dn) * std::log(s.t) + log_weight(order, g, s); }));
  }
  return out;
}

/// Standard sample sets: in 1-D the (t, x, y) grid with t log-spaced in
/// [t_lo, t_hi] (t_count values) and x, y on (0, 4] (40 points), refined until the
/// family has at least `min_count` admissible samples; in n-D seeded uniform
/// samples in [0.05, 4]^n with log-uniform t, grown likewise.
inline std::vector<Sample> standard_samples(const MultiOrder& order, const BoundFamily& family,
                                            std::size_t min_count = 10000, unsigned long long seed = 1,
                                            double t_lo = 0.01, double t_hi = 10.0, int t_count = 20) {
  auto count = [&](const std::vector<Sample>& v) {
    if (!family.admissible) return v.size();
    std::size_t c = 0;
    for (const auto& s : v) c += family.admissible(s) ? 1 : 0;
    return c;
  };
  if (order.dim() == 1) {
    int points = 40;
    for (;;) {
      auto v = grid_samples_1d(log_spaced(t_lo, t_hi, t_count), uniform_points(4.0, points));
      if (count(v) >= min_count || points > 2000) return v;
      points = int(points * 1.25) + 1;
    }
  }
  std::size_t total = std::max<std::size_t>(min_count + min_count / 5, 12000);
  for (;;) {
    auto v = random_samples(order.dim(), 0.05, 4.0, t_lo, t_hi, total, seed);
    if (count(v) >= min_count || total > 100 * min_count) return v;
    total *= 2;
  }
}

}  // namespace laguerre
