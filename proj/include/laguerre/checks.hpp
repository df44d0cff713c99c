#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "laguerre/bound_fit.hpp"
#include "laguerre/critical_function.hpp"
#include "laguerre/delta_kernel.hpp"
#include "laguerre/hardy_bmo.hpp"
#include "laguerre/heat_kernel.hpp"
#include "laguerre/kernel_families.hpp"
#include "laguerre/operators.hpp"
#include "laguerre/report.hpp"
#include "laguerre/riesz.hpp"
#include "laguerre/special_functions.hpp"

// Reusable verification checks. Each appends its CheckResults (and any fit or
// norm reports) to a SuiteReport; suites and the acceptance binary share them.
namespace laguerre::checks {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string order_label(const MultiOrder& o) {
  std::string s = "[nu=";
  for (std::size_t j = 0; j < o.dim(); ++j) s += (j ? "," : "") + fmt(o[j]);
  return s + "]";
}

/// value < tolerance (NaN fails).
inline CheckResult below(std::string name, double value, double tol, std::string detail, double seconds) {
  return {std::move(name), value < tol, value, tol, std::move(detail), seconds};
}

inline double relative_l2(const std::vector<double>& a, const std::vector<double>& b, const TensorGrid& g) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = g.weight(i);
    num += w * (a[i] - b[i]) * (a[i] - b[i]);
    den += w * b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline double drift(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)); }

using Fn = std::function<double(double)>;

inline double diff5(const Fn& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// delta_nu applied numerically: f' + x f - (nu + 1/2) f / x.
inline Fn numeric_delta(Fn f, double nu, double h) {
  return [=](double x) { return diff5(f, x, h) + x * f(x) - (nu + 0.5) * f(x) / x; };
}

}  // namespace detail

// --- special functions -------------------------------------------------------------

/// Scaled Bessel values against 50-digit arithmetic.
inline void bessel_oracle(SuiteReport& rep, double tol = 5e-13) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const Stopwatch sw;
  double worst = 0;
  for (double a : {-0.5, -0.3, 0.0, 0.5, 1.0, 1.7, 5.0, 20.0, 60.0})
    for (double z : {1e-8, 0.1, 1.0, 5.0, 20.0, 29.9, 30.1, 50.0, 120.0, 1e3, 1e4}) {
      const double want = static_cast<double>(boost::math::cyl_bessel_i(big(a), big(z)) * exp(-big(z)));
      worst = std::max(worst, std::fabs(scaled_bessel_i(a, z) - want) / want);
    }
  rep.checks.push_back(detail::below("bessel.oracle", worst, tol,
                                     "max relative error of e^{-z} I_a(z) vs 50-digit oracle", sw.seconds()));
}

/// The four Bessel relations: difference identity (with positivity),
/// neighbour bound, derivative identity, small-z asymptotics.
inline void bessel_identities(SuiteReport& rep, double tol_difference = 1e-12, double tol_derivative = 1e-6,
                              double tol_small = 1e-4) {
  const std::vector<double> alphas{-0.5, 0.0, 1.7};
  {
    const Stopwatch sw;
    double worst = 0;
    bool positive = true;
    for (double a : alphas)
      for (double z : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0}) {
        const double lhs = scaled_bessel_i(a, z) - scaled_bessel_i(a + 2, z);
        const double rhs = 2 * (a + 1) / z * scaled_bessel_i(a + 1, z);
        positive = positive && lhs > 0;
        worst = std::max(worst, std::fabs(lhs - rhs) / std::fabs(rhs));
      }
    auto c = detail::below("bessel.difference_identity", worst, tol_difference,
                           "I_a - I_{a+2} = 2(a+1)/z I_{a+1}, max relative error; left side positive", sw.seconds());
    c.passed = c.passed && positive;
    rep.checks.push_back(c);
  }
  {
    const Stopwatch sw;
    double worst = 0;  // largest |I_a - I_{a+1}| / ((4a+6) I_{a+1} / z); must stay < 1
    for (double a : alphas)
      for (double z : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0, 200.0})
        worst = std::max(worst, std::fabs(scaled_bessel_i(a, z) - scaled_bessel_i(a + 1, z)) /
                                    ((4 * a + 6) * scaled_bessel_i(a + 1, z) / z));
    rep.checks.push_back(detail::below("bessel.neighbour_bound", worst, 1.0,
                                       "max |I_a - I_{a+1}| / ((4a+6) I_{a+1}/z), strict bound 1", sw.seconds()));
  }
  {
    const Stopwatch sw;
    double worst = 0;
    for (double a : alphas)
      for (double z : {0.5, 1.0, 5.0, 20.0}) {
        auto g = [&](double s) { return std::pow(s, -a) * scaled_bessel_i(a, s) * std::exp(s - z); };
        const double fd = detail::diff5(g, z, 1e-4 * z);
        const double want = std::pow(z, -a) * scaled_bessel_i(a + 1, z);
        worst = std::max(worst, std::fabs(fd - want) / want);
      }
    rep.checks.push_back(detail::below("bessel.derivative_identity", worst, tol_derivative,
                                       "d/dz (z^-a I_a) = z^-a I_{a+1} against 5-point differences", sw.seconds()));
  }
  {
    const Stopwatch sw;
    double worst = 0;
    for (double a : alphas) {
      const double z = 1e-6;
      const double ratio = scaled_bessel_i(a, z) * std::exp(z) / std::pow(z, a);
      const double want = 1.0 / (std::pow(2.0, a) * std::tgamma(a + 1));
      worst = std::max(worst, std::fabs(ratio - want) / want);
    }
    rep.checks.push_back(detail::below("bessel.small_z", worst, tol_small,
                                       "I_a(z) ~ (z/2)^a / Gamma(a+1) at z = 1e-6", sw.seconds()));
  }
}

/// Laguerre polynomials against exact rational recurrence.
inline void laguerre_rational_oracle(SuiteReport& rep, double tol = 1e-12) {
  using R = boost::multiprecision::cpp_rational;
  const Stopwatch sw;
  auto exact = [](int k, const R& alpha, const R& x) {
    R prev = 1, cur = 1 + alpha - x;
    if (k == 0) return prev;
    for (int j = 1; j < k; ++j) {
      R next = ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1);
      prev = cur;
      cur = next;
    }
    return cur;
  };
  double worst = 0;
  for (int k : {0, 1, 5, 12, 30})
    for (auto [an, ad] : {std::pair{-1, 2}, {0, 1}, {13, 10}, {3, 1}})
      for (auto [xn, xd] : {std::pair{1, 10}, {1, 1}, {3, 1}, {7, 2}}) {
        const double want = static_cast<double>(exact(k, R(an, ad), R(xn, xd)));
        const double got = laguerre_polynomial(k, double(an) / ad, double(xn) / xd);
        if (want != 0) worst = std::max(worst, std::fabs(got - want) / std::fabs(want));
      }
  rep.checks.push_back(detail::below("laguerre.rational_oracle", worst, tol,
                                     "max relative error of L_k^a(x) vs exact rational recurrence", sw.seconds()));
}

/// Gram matrix of phi_0..phi_kmax under the grid quadrature, per axis order.
inline void laguerre_orthonormality(SuiteReport& rep, const std::vector<double>& nus, int kmax, double x_max,
                                    int nodes_per_unit, double tol = 1e-10) {
  const Stopwatch sw;
  const QuadratureRule q = TensorGrid::half_space(1, x_max, nodes_per_unit).axes[0];
  double worst = 0;
  for (double nu : nus) {
    std::vector<std::vector<double>> phi(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) phi[i] = laguerre_functions_upto(kmax, nu, q.nodes[i]);
    for (int a = 0; a <= kmax; ++a)
      for (int b = a; b <= kmax; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * phi[i][a] * phi[i][b];
        worst = std::max(worst, std::fabs(s - (a == b ? 1.0 : 0.0)));
      }
  }
  rep.checks.push_back(detail::below("laguerre.orthonormality", worst, tol,
                                     "max |<phi_a, phi_b> - delta_ab| for a, b <= " + std::to_string(kmax),
                                     sw.seconds()));
}

// --- heat kernel ---------------------------------------------------------------------

/// e^{-tL} phi_k = e^{-t lambda_k} phi_k with the semigroup applied by kernel
/// quadrature; indices k e_j on every axis, k <= k_top.
inline void eigen_relation(SuiteReport& rep, const MultiOrder& order, int k_top, const std::vector<double>& times,
                           double x_max, int nodes_per_unit, double tol = 1e-6, int jobs = 1) {
  const Stopwatch sw;
  const TensorGrid g = TensorGrid::half_space(order.dim(), x_max, nodes_per_unit);
  const auto shape = g.shape();
  std::vector<std::pair<int, GridFunction>> eigenfunctions;  // (k, phi_{k e_axis})
  for (std::size_t axis = 0; axis < order.dim(); ++axis)
    for (int k = 0; k <= k_top; ++k) {
      if (axis > 0 && k == 0) continue;
      std::vector<int> idx(order.dim(), 0);
      idx[axis] = k;
      eigenfunctions.emplace_back(
          k, GridFunction::sample(g, [&](std::span<const double> x) { return laguerre_function(idx, order, x); }));
    }
  double worst = 0;
  for (double t : times) {
    std::vector<std::vector<double>> mats;
    for (std::size_t j = 0; j < order.dim(); ++j) mats.push_back(kernel_matrix(g.axes[j], order[j], t, jobs));
    for (const auto& [k, phi] : eigenfunctions) {
      std::vector<double> data = phi.values;
      auto sh = shape;
      for (std::size_t j = 0; j < order.dim(); ++j) data = contract_axis(data, sh, j, mats[j], sh[j]);
      const double decay = std::exp(-t * order.eigenvalue(k));
      std::vector<double> want = phi.values;
      for (double& v : want) v *= decay;
      worst = std::max(worst, detail::relative_l2(data, want, g) * decay);
    }
  }
  rep.checks.push_back(detail::below("heat.eigen_relation" + detail::order_label(order), worst, tol,
                                     "max ||e^{-tL}phi_k - e^{-t lambda_k} phi_k|| / ||phi_k||, kernel quadrature",
                                     sw.seconds()));
}

/// Closed-form kernel vs truncated eigen-expansion on `points`^n x `points`^n pairs.
inline void closed_vs_spectral(SuiteReport& rep, const MultiOrder& order, const std::vector<double>& times, int k_max,
                               int points = 20, double lo = 0.1, double hi = 2.5, double tol = 1e-8, int jobs = 1) {
  const Stopwatch sw;
  const std::size_t n = order.dim();
  std::vector<double> axis(points);
  for (int i = 0; i < points; ++i) axis[i] = lo + (hi - lo) * i / std::max(1, points - 1);
  std::size_t count = 1;
  for (std::size_t j = 0; j < n; ++j) count *= std::size_t(points);
  auto point = [&](std::size_t flat) {
    std::vector<double> p(n);
    for (std::size_t j = n; j-- > 0;) p[j] = axis[flat % points], flat /= points;
    return p;
  };
  std::vector<double> worst_row(count, 0.0), tail_row(count, 0.0);
  for (double t : times)
    parallel_for(count, jobs, [&](std::size_t i) {
      const auto x = point(i);
      for (std::size_t l = 0; l < count; ++l) {
        const auto y = point(l);
        const auto s = kernel_spectral_sum(order, t, x, y, k_max);
        const double c = kernel_nd(order, t, x, y);
        worst_row[i] = std::max(worst_row[i], std::fabs(c - s.value) / std::fabs(c));
        tail_row[i] = std::max(tail_row[i], s.tail_estimate / std::fabs(c));
      }
    });
  const double worst = *std::max_element(worst_row.begin(), worst_row.end());
  const double tail = *std::max_element(tail_row.begin(), tail_row.end());
  rep.checks.push_back(detail::below("heat.closed_vs_spectral" + detail::order_label(order), worst, tol,
                                     "max relative difference, k_max=" + std::to_string(k_max) +
                                         ", relative tail bound " + detail::fmt(tail),
                                     sw.seconds()));
}

/// Chapman-Kolmogorov: int p_t(x,z) p_s(z,y) dz = p_{t+s}(x,y) by tensor
/// Gauss-Legendre quadrature on [0, X]^n, X = max coordinate + 6 sqrt(t+s) + 2.
inline void semigroup_law(SuiteReport& rep, const MultiOrder& order, const std::vector<double>& times,
                          int nodes_per_unit, std::size_t pairs = 8, unsigned long long seed = 1, double tol = 1e-6) {
  const Stopwatch sw;
  const std::size_t n = order.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.2, 3.0);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pts(pairs);
  double coord_max = 0;
  for (auto& [x, y] : pts) {
    x.resize(n), y.resize(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = ux(rng), y[j] = ux(rng), coord_max = std::max({coord_max, x[j], y[j]});
  }
  double worst = 0;
  for (double t : times)
    for (double s : times) {
      const double X = coord_max + 6 * std::sqrt(t + s) + 2;
      const TensorGrid g = TensorGrid::half_space(n, X, nodes_per_unit);
      for (const auto& [x, y] : pts) {
        // per-axis factors of the tensor-product kernels at the grid nodes
        std::vector<std::vector<double>> f(n);
        for (std::size_t j = 0; j < n; ++j) {
          const auto& q = g.axes[j];
          f[j].resize(q.size());
          for (std::size_t i = 0; i < q.size(); ++i)
            f[j][i] = kernel_1d_closed(order[j], t, x[j], q.nodes[i]) * kernel_1d_closed(order[j], s, q.nodes[i], y[j]);
        }
        double sum = 0;
        const std::size_t size = g.size();
        for (std::size_t flat = 0; flat < size; ++flat) {
          double v = g.weight(flat);
          std::size_t r = flat;
          for (std::size_t j = n; j-- > 0;) {
            v *= f[j][r % f[j].size()];
            r /= f[j].size();
          }
          sum += v;
        }
        const double want = kernel_nd(order, t + s, x, y);
        worst = std::max(worst, std::fabs(sum - want) / want);
      }
    }
  rep.checks.push_back(detail::below("heat.semigroup_law" + detail::order_label(order), worst, tol,
                                     "max relative error of the quadrature convolution over (t, s) pairs",
                                     sw.seconds()));
}

/// Symbolic delta^m kernels (m = 1, 2) vs nested numeric delta on random
/// (t, x, y), plain relative error. Steps scale with min(x, sqrt(t)), the
/// length over which the kernel varies; the outer step is small enough that
/// near-zeros of delta^2 p stay resolved.
inline void delta_vs_fd(SuiteReport& rep, const std::vector<double>& nus, std::size_t samples = 100,
                        unsigned long long seed = 1, double tol = 1e-5) {
  const Stopwatch sw;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(-1.5, 0.5), ux(0.3, 3.0);
  double worst = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double nu = nus[i % nus.size()];
    const double t = std::pow(10.0, ut(rng)), x = ux(rng), y = ux(rng);
    const detail::Fn p = [=](double s) { return kernel_1d_closed(nu, t, s, y); };
    const double scale = std::min(x, std::sqrt(t));
    const detail::Fn d1 = detail::numeric_delta(p, nu, 1e-3 * scale);
    const detail::Fn d2 = detail::numeric_delta(d1, nu, 5e-3 * scale);
    const MultiOrder o({nu});
    const double a1 = delta_kernel(o, std::vector{1}, t, std::vector{x}, std::vector{y});
    const double a2 = delta_kernel(o, std::vector{2}, t, std::vector{x}, std::vector{y});
    const double e1 = std::fabs(a1 - d1(x)), e2 = std::fabs(a2 - d2(x));
    worst = std::max({worst, e1 / std::fabs(a1), e2 / std::fabs(a2)});
  }
  rep.checks.push_back(detail::below("heat.delta_vs_finite_differences", worst, tol,
                                     "max |err| / |delta^m p|, m <= 2, over " + std::to_string(samples) +
                                         " random (t,x,y)",
                                     sw.seconds()));
}

/// Symmetry and positivity of the closed-form kernel on a coarse grid.
inline void kernel_symmetry(SuiteReport& rep, const MultiOrder& order) {
  const Stopwatch sw;
  const std::size_t n = order.dim();
  double worst = 0;
  bool positive = true;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.05, 4.0), ut(-2, 1);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = ux(rng), y[j] = ux(rng);
    const double t = std::pow(10.0, ut(rng));
    const double a = kernel_nd(order, t, x, y), b = kernel_nd(order, t, y, x);
    positive = positive && a > 0 && std::isfinite(a);
    worst = std::max(worst, std::fabs(a - b) / a);
  }
  auto c = detail::below("heat.symmetry" + detail::order_label(order), worst, 1e-14,
                         "max |p(x,y) - p(y,x)| / p(x,y) over 500 random pairs; all values positive", sw.seconds());
  c.passed = c.passed && positive;
  rep.checks.push_back(c);
}

// --- bound fits ----------------------------------------------------------------------

/// Pass rule of a bound-fit family: finite C, no violations, enough samples,
/// and for Gaussian families a minimal decay constant in [1, 8].
inline void record_fit(SuiteReport& rep, const BoundFamily& family, const BoundFitReport& fit,
                       std::size_t min_samples, double seconds) {
  bool ok = fit.passed() && fit.n_samples >= long(min_samples);
  double value = fit.fitted_C;
  std::string detail = "C=" + detail::fmt(fit.fitted_C) + " n=" + std::to_string(fit.n_samples) +
                       " violations=" + std::to_string(fit.violations.size());
  if (family.gaussian) {
    const auto it = fit.extras.find("min_decay_c");
    const double c = it == fit.extras.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
    ok = ok && c >= 1.0 && c <= 8.0;
    value = c;
    detail += " min_decay_c=" + detail::fmt(c) + " (must lie in [1, 8])";
  }
  rep.bound_fits.push_back(fit);
  rep.checks.push_back({"fit:" + fit.family_id, ok, value, std::numeric_limits<double>::quiet_NaN(), detail, seconds});
}

/// Time range of the standard sample sets.
struct TimeRange {
  double lo = 0.01, hi = 10.0;
  int count = 20;
};

inline void heat_bound_fits(SuiteReport& rep, const MultiOrder& order, std::size_t min_samples = 10000,
                            unsigned long long seed = 1, int jobs = 1, TimeRange tr = {}) {
  FitOptions opt;
  opt.jobs = jobs;
  for (const auto& f : heat_kernel_families(order)) {
    const Stopwatch sw;
    const auto fit =
        fit_gaussian_bound(f, standard_samples(order, f, min_samples, seed, tr.lo, tr.hi, tr.count), opt);
    record_fit(rep, f, fit, min_samples, sw.seconds());
  }
}

/// Sample sets for the Riesz families: t-free 1-D families use a fine (x, y)
/// lattice, everything else the standard heat-family sets.
inline std::vector<Sample> riesz_samples(const MultiOrder& order, const BoundFamily& f, std::size_t min_count,
                                         unsigned long long seed, TimeRange tr = {}) {
  if (order.dim() == 1 && f.id.rfind("riesz.", 0) == 0) {
    const int m = int(std::ceil(std::sqrt(double(min_count)))) + 1;
    return grid_samples_1d({1.0}, uniform_points(4.0, m));
  }
  return standard_samples(order, f, min_count, seed, tr.lo, tr.hi, tr.count);
}

inline void riesz_bound_fits(SuiteReport& rep, const MultiOrder& order, const std::vector<int>& k,
                             std::size_t min_samples = 10000, unsigned long long seed = 1, int jobs = 1,
                             TimeRange tr = {}) {
  FitOptions opt;
  opt.jobs = jobs;
  for (const auto& f : riesz_bound_families(order, k)) {
    const Stopwatch sw;
    const auto fit = fit_gaussian_bound(f, riesz_samples(order, f, min_samples, seed, tr), opt);
    record_fit(rep, f, fit, min_samples, sw.seconds());
  }
}

// --- Riesz transforms ------------------------------------------------------------------

/// All k with 1 <= |k| <= top.
inline std::vector<std::vector<int>> riesz_indices(std::size_t n, int top) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(n, 0);
  auto rec = [&](auto&& self, std::size_t j, int left) -> void {
    if (j == n) {
      if (total_degree(k) >= 1) out.push_back(k);
      return;
    }
    for (int v = 0; v <= left; ++v) k[j] = v, self(self, j + 1, left - v);
  };
  rec(rec, 0, top);
  return out;
}

/// Multipliers bounded by 1 and L2 contraction on random truncated expansions.
inline void riesz_contraction(SuiteReport& rep, const MultiOrder& order, std::size_t trials = 200,
                              unsigned long long seed = 1, int k_max = -1) {
  const int km = k_max < 0 ? default_k_max(order.dim()) : k_max;
  const auto ks = riesz_indices(order.dim(), 3);
  {
    const Stopwatch sw;
    double worst = 0;
    for (const auto& k : ks)
      for (auto variant : {RieszVariant::single_power, RieszVariant::composition})
        for (const auto& [key, m] : riesz_multiplier_table(order, k, km, variant)) worst = std::max(worst, std::fabs(m));
    auto c = detail::below("riesz.multipliers" + detail::order_label(order), worst, 1.0,
                           "max |multiplier| over |k| <= 3 and all coefficients up to k_max=" + std::to_string(km),
                           sw.seconds());
    c.passed = worst <= 1.0;
    rep.checks.push_back(c);
  }
  const Stopwatch sw;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    SpectralCoefficients c(order, km);
    c.transform([&](std::span<const int>, double) { return nd(rng); });
    const auto& k = ks[trial % ks.size()];
    for (auto variant : {RieszVariant::single_power, RieszVariant::composition})
      worst = std::max(worst, riesz_spectral(c, k, variant).l2_norm() / c.l2_norm());
  }
  auto c = detail::below("riesz.contraction" + detail::order_label(order), worst, 1 + 1e-10,
                         "max ||R_k f|| / ||f|| over " + std::to_string(trials) + " random truncated f", sw.seconds());
  c.passed = worst <= 1 + 1e-10;
  rep.checks.push_back(c);
}

/// Per-axis lattice on (0, 4]: `points` uniform nodes joined with `points`
/// geometric ones down to 4e-3. The geometric part resolves the boundary
/// layer, where the kernel is nearly scale invariant and the sup of |K| d^n
/// can sit at y/x -> 0. Doubling `points` refines both parts.
inline std::vector<double> size_lattice(int points) {
  std::vector<double> v = uniform_points(4.0, points);
  for (double g : log_spaced(4e-3, 4.0, points)) v.push_back(g);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

/// sup |K(x,y)| |x-y|^n over all pairs of the tensor lattice size_lattice(points)^n.
inline double riesz_size_sup(const MultiOrder& order, const std::vector<int>& k, int points, int jobs = 1) {
  const std::size_t n = order.dim();
  const auto axis = size_lattice(points);
  const std::size_t m = axis.size();
  std::size_t count = 1;
  for (std::size_t j = 0; j < n; ++j) count *= m;
  auto point = [&](std::size_t flat) {
    std::vector<double> p(n);
    for (std::size_t j = n; j-- > 0;) p[j] = axis[flat % m], flat /= m;
    return p;
  };
  const RieszKernel kernel(order, k);
  std::vector<double> row(count, 0.0);
  parallel_for(count, jobs, [&](std::size_t i) {
    const auto x = point(i);
    for (std::size_t l = 0; l < count; ++l) {
      if (l == i) continue;
      const auto y = point(l);
      double d2 = 0;
      for (std::size_t j = 0; j < n; ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
      const double v = std::fabs(kernel(x, y)) * std::pow(d2, 0.5 * double(n));
      row[i] = std::isfinite(v) ? std::max(row[i], v) : std::numeric_limits<double>::infinity();
    }
  });
  return *std::max_element(row.begin(), row.end());
}

/// CZ size constant stable under lattice refinement, and the Hoelder exponent.
inline void calderon_zygmund(SuiteReport& rep, const MultiOrder& order, const std::vector<int>& k, int points,
                             unsigned long long seed = 1, int jobs = 1, double drift_tol = 0.05) {
  {
    const Stopwatch sw;
    const double coarse = riesz_size_sup(order, k, points, jobs), fine = riesz_size_sup(order, k, 2 * points, jobs);
    auto c = detail::below("riesz.cz_size" + detail::order_label(order), detail::drift(coarse, fine), drift_tol,
                           "relative drift of sup|K| d^n between lattices of " + std::to_string(points) + " and " +
                               std::to_string(2 * points) + " uniform+geometric points per axis (sup " + detail::fmt(coarse) + " -> " +
                               detail::fmt(fine) + ")",
                           sw.seconds());
    c.passed = c.passed && std::isfinite(fine);
    rep.checks.push_back(c);
  }
  const Stopwatch sw;
  SmoothnessSpec spec;
  spec.samples = random_samples(order.dim(), 0.1, 3.0, 1, 1, 40, seed);
  spec.jobs = jobs;
  const auto fit = verify_cz_smoothness(order, k, spec);
  const double e = fit.extras.at("empirical_exponent"), gamma = order.smoothness_exponent();
  rep.bound_fits.push_back(fit);
  rep.checks.push_back({"riesz.cz_smoothness" + detail::order_label(order), fit.passed() && e >= gamma - 0.05, e,
                        gamma - 0.05, "empirical Hoelder exponent, must be >= gamma - 0.05 (gamma=" + detail::fmt(gamma) + ")",
                        sw.seconds()});
}

// --- critical function ---------------------------------------------------------------------

inline void slow_variation(SuiteReport& rep, const MultiOrder& order, const Box& box, std::size_t pairs = 10000,
                           unsigned long long seed = 1) {
  const Stopwatch sw;
  const auto fit = check_slow_variation(order, SlowVariationSpec{box, pairs, seed});
  rep.bound_fits.push_back(fit);
  rep.checks.push_back({"critical.slow_variation" + detail::order_label(order), fit.passed() && fit.n_samples >= long(pairs),
                        double(fit.violations.size()), 0.0,
                        "violations of rho(x)/2 <= rho(y) <= 2 rho(x) over " + std::to_string(fit.n_samples) +
                            " pairs; max ratio " + detail::fmt(fit.max_ratio),
                        sw.seconds()});
}

inline CoveringCheck covering(SuiteReport& rep, const MultiOrder& order, const Box& box) {
  const Stopwatch sw;
  const auto cov = build_covering(order, box);
  const CoveringCheck chk = verify_covering(cov, order.dim() == 1 ? 1000 : 100);
  rep.checks.push_back({"critical.covering" + detail::order_label(order), chk.passed(), chk.partition_error, 1e-12,
                        std::to_string(chk.balls) + " balls; covers=" + (chk.covers ? "yes" : "no") +
                            " fifth_disjoint=" + (chk.fifth_disjoint ? "yes" : "no") +
                            " bumps_supported=" + (chk.bumps_supported ? "yes" : "no") +
                            " max_overlap=" + std::to_string(chk.max_overlap) + " psi in [" + detail::fmt(chk.psi_min) +
                            ", " + detail::fmt(chk.psi_max) + "]",
                        sw.seconds()});
  return chk;
}

// --- Hardy and BMO ---------------------------------------------------------------------------

/// Random valid atoms; returns them for serialization.
inline std::vector<Atom> atom_library(SuiteReport& rep, const MultiOrder& order, const Box& box, double p,
                                      std::size_t count, unsigned long long seed) {
  const Stopwatch sw;
  const auto balls = random_balls(order, box, count, seed);
  std::vector<Atom> atoms;
  std::size_t valid = 0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    atoms.push_back(random_atom(order, balls[i], p, seed * 1000 + i));
    valid += check_atom(atoms.back(), order).valid();
  }
  rep.checks.push_back({"hardy.atoms_valid" + detail::order_label(order) + "[p=" + detail::fmt(p) + "]",
                        valid == atoms.size(), double(atoms.size() - valid), 0.0,
                        "atoms failing support/size/moment conditions out of " + std::to_string(atoms.size()),
                        sw.seconds()});
  return atoms;
}

/// max over random atoms of ||M a||_p, for t-grids of `times` and 2 `times` points.
inline void atom_maximal_bound(SuiteReport& rep, const MultiOrder& order, const Box& box, double p,
                               std::size_t count = 50, unsigned long long seed = 1, int times = 40, int jobs = 1) {
  const Stopwatch sw;
  const std::string label = detail::order_label(order) + "[p=" + detail::fmt(p) + "]";
  if (!(p > critical_exponent(order))) {
    rep.checks.push_back({"hardy.atom_maximal" + label, false, std::numeric_limits<double>::quiet_NaN(),
                          critical_exponent(order), "p must exceed the critical exponent n/(n+gamma)", 0.0});
    return;
  }
  const auto balls = random_balls(order, box, count, seed);
  MaximalEvalSpec spec;
  spec.jobs = jobs;
  const auto coarse_t = log_spaced(1e-4, 4, times), fine_t = log_spaced(1e-4, 4, 2 * times);
  NormReport best_coarse, best_fine;
  best_coarse.value = best_fine.value = -1;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const Atom a = random_atom(order, balls[i], p, seed * 1000 + i);
    const auto r1 = hardy_norm_maximal(a, order, coarse_t, spec), r2 = hardy_norm_maximal(a, order, fine_t, spec);
    if (r1.value > best_coarse.value) best_coarse = r1;
    if (r2.value > best_fine.value) best_fine = r2;
  }
  rep.norms.push_back(best_fine);
  auto c = detail::below("hardy.atom_maximal" + label, detail::drift(best_coarse.value, best_fine.value), 0.05,
                         "drift of max ||M a||_p over " + std::to_string(count) + " atoms under t-grid doubling (" +
                             detail::fmt(best_coarse.value) + " -> " + detail::fmt(best_fine.value) + ")",
                         sw.seconds());
  c.passed = c.passed && std::isfinite(best_fine.value);
  rep.checks.push_back(c);
}

/// max |<f, a>| / ||f||_BMO(s) over random (field, atom) pairs, s = n(1/p - 1),
/// at base resolution and with atom grid and ball quadrature refined 2x.
inline void duality_bound(SuiteReport& rep, const MultiOrder& order, const Box& box, double p = 0.9,
                          std::size_t pairs = 100, unsigned long long seed = 1, int jobs = 1) {
  const Stopwatch sw;
  const double n = double(order.dim()), s = n * (1 / p - 1);
  const int M = int(std::floor(s));
  const auto family = multiscale_ball_family(order, box, order.dim() == 1 ? 12 : 6);
  const auto balls = random_balls(order, box, pairs, seed);
  double r1 = 0, r2 = 0;
  NormReport worst;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto f = random_field(order.dim(), seed * 7919 + i);
    const auto n1 = bmo_norm(f, order, s, 1, M, family, 16, jobs), n2 = bmo_norm(f, order, s, 1, M, family, 32, jobs);
    const double a1 = std::fabs(duality_pairing(f, random_atom(order, balls[i], p, seed * 1000 + i, 2, 16))) / n1.value;
    const double a2 = std::fabs(duality_pairing(f, random_atom(order, balls[i], p, seed * 1000 + i, 4, 16))) / n2.value;
    r1 = std::max(r1, a1);
    if (a2 > r2) r2 = a2, worst = n2;
  }
  rep.norms.push_back(worst);
  auto c = detail::below("hardy.duality" + detail::order_label(order) + "[p=" + detail::fmt(p) + "]",
                         detail::drift(r1, r2), 0.05,
                         "drift of max |<f,a>| / ||f||_BMO over " + std::to_string(pairs) +
                             " pairs under 2x refinement (" + detail::fmt(r1) + " -> " + detail::fmt(r2) + ")",
                         sw.seconds());
  c.passed = c.passed && std::isfinite(r2);
  rep.checks.push_back(c);
}

}  // namespace laguerre::checks
