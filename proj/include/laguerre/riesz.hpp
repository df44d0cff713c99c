#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "laguerre/bound_fit.hpp"
#include "laguerre/critical_function.hpp"
#include "laguerre/delta_kernel.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/operators.hpp"
#include "laguerre/quadrature.hpp"

namespace laguerre {

// --- spectral form -------------------------------------------------------------

/// How L^{-|k|/2} is interleaved with the k lowering steps:
///  - single_power: one multiplier (4|a|+2|nu|+2n)^{-|k|/2}, then all lowerings;
///  - composition:  each lowering is preceded by the inverse square root of the
///    operator it acts on (whose order has been shifted by earlier steps).
/// Both coincide for |k| = 1.
enum class RieszVariant { single_power, composition };

inline int total_degree(std::span<const int> k) { return std::accumulate(k.begin(), k.end(), 0); }

namespace detail {
inline void check_riesz_index(const MultiOrder& order, std::span<const int> k) {
  if (k.size() != order.dim()) throw UsageError("Riesz transform: multi-index dimension mismatch");
  for (int v : k)
    if (v < 0) throw UsageError("Riesz transform: multi-index entries must be >= 0");
  if (total_degree(k) == 0) throw UsageError("Riesz transform: need |k| >= 1");
}
}  // namespace detail

/// Coefficient taking <f, phi_a^nu> to the coefficient of phi_{a-k}^{nu+k} in
/// delta^k L^{-|k|/2} f. Zero when some a_j < k_j.
inline double riesz_multiplier(const MultiOrder& order, std::span<const int> k, std::span<const int> a,
                               RieszVariant variant = RieszVariant::single_power) {
  detail::check_riesz_index(order, k);
  if (a.size() != k.size()) throw UsageError("riesz_multiplier: multi-index dimension mismatch");
  for (std::size_t j = 0; j < k.size(); ++j)
    if (a[j] < k[j]) return 0.0;
  const int steps = total_degree(k);
  const double lambda = order.eigenvalue(total_degree(a));
  // lowering: delta_{nu_j} phi_a^nu = -2 sqrt(a_j) phi_{a-e_j}^{nu+e_j}
  double m = steps % 2 ? -1.0 : 1.0;
  for (std::size_t j = 0; j < k.size(); ++j)
    for (int i = 0; i < k[j]; ++i) m *= 2.0 * std::sqrt(double(a[j] - i));
  if (variant == RieszVariant::single_power) return m * std::pow(lambda, -0.5 * steps);
  // every step lowers |a| by one and raises |nu| by one: the eigenvalue drops by 2
  for (int i = 0; i < steps; ++i) m /= std::sqrt(lambda - 2.0 * i);
  return m;
}

/// delta^k L^{-|k|/2} on coefficients; the result lives in the basis of order nu + k.
inline SpectralCoefficients riesz_spectral(const SpectralCoefficients& c, std::span<const int> k,
                                           RieszVariant variant = RieszVariant::single_power) {
  detail::check_riesz_index(c.order(), k);
  SpectralCoefficients out(c.order().shifted(k), c.k_max());
  std::vector<int> b(k.size());
  c.for_each([&](std::span<const int> a, double v) {
    for (std::size_t j = 0; j < k.size(); ++j) {
      if (a[j] < k[j]) return;
      b[j] = a[j] - k[j];
    }
    out.set(b, v * riesz_multiplier(c.order(), k, a, variant));
  });
  return out;
}

inline GridFunction riesz_spectral(const GridFunction& f, const MultiOrder& order, std::span<const int> k,
                                   RieszVariant variant = RieszVariant::single_power, int k_max = -1) {
  const auto c = analyze(f, order, k_max < 0 ? default_k_max(order.dim()) : k_max);
  return synthesize(riesz_spectral(c, k, variant), f.grid);
}

/// Multiplier table keyed by "a1,...,an" for |a| <= k_max.
inline std::map<std::string, double> riesz_multiplier_table(const MultiOrder& order, std::span<const int> k,
                                                            int k_max,
                                                            RieszVariant variant = RieszVariant::single_power) {
  std::map<std::string, double> out;
  SpectralCoefficients shape(order, k_max);
  shape.for_each([&](std::span<const int> a, double) {
    out[SpectralCoefficients::key(a)] = riesz_multiplier(order, k, a, variant);
  });
  return out;
}

// --- kernel form ---------------------------------------------------------------

/// Which variable a kernel derivative acts on.
enum class KernelGradient { none, x, y };

/// Kernel of delta^k L^{-|k|/2} (and of delta^k e^{-tL} L^{-|k|/2}) through the
/// subordination integral
///   K_t(x, y) = Gamma(|k|/2)^{-1} int_0^inf u^{|k|/2} delta^k p_{t+u}(x, y) du/u,
/// optionally differentiated in x_j or y_j. The integral is split at u = t,
/// u = |x-y|^2 and u = 1; below 1 it is taken in s = log u, above 1 in u.
class RieszKernel {
 public:
  RieszKernel(MultiOrder order, std::vector<int> k, KernelGradient grad = KernelGradient::none, std::size_t axis = 0)
      : order_(std::move(order)), k_(std::move(k)), grad_(grad), axis_(axis) {
    detail::check_riesz_index(order_, k_);
    if (axis_ >= order_.dim()) throw UsageError("RieszKernel: derivative axis out of range");
    std::vector<std::vector<AxisOp>> w(order_.dim());
    for (std::size_t j = 0; j < w.size(); ++j) w[j].assign(k_[j], AxisOp::Delta);
    if (grad_ != KernelGradient::none) w[axis_].push_back(grad_ == KernelGradient::x ? AxisOp::Dx : AxisOp::Dy);
    op_ = std::make_shared<KernelOperator>(order_);
    op_->add_product(1.0, w);
    half_ = 0.5 * total_degree(k_);
    log_gamma_half_ = log_gamma(half_);
    // slowest exponential rate of any term at large u
    decay_rate_ = order_.eigenvalue(0);
  }

  const MultiOrder& order() const { return order_; }
  const std::vector<int>& index() const { return k_; }

  /// K(x, y); x == y raises SingularityError.
  double operator()(std::span<const double> x, std::span<const double> y) const { return evaluate(0.0, x, y); }

  /// K_t(x, y) for t >= 0; t > 0 allows x == y.
  double evaluate(double t, std::span<const double> x, std::span<const double> y) const {
    detail::check_dims(order_, x, y);
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("Riesz kernel: t must be finite and >= 0");
    double d2 = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!(x[j] > 0) || !(y[j] > 0)) throw DomainError("Riesz kernel: coordinates must be > 0");
      d2 += (x[j] - y[j]) * (x[j] - y[j]);
    }
    if (d2 == 0 && t == 0) throw SingularityError("Riesz kernel: x == y");

    // breakpoints in u
    double u_lo;
    if (t == 0) {
      u_lo = d2 / 400.0;
    } else {
      u_lo = std::log(d2 > 0 ? std::min(d2 / 400.0, t) : t) - 50.0 / (2 * half_);
      u_lo = std::exp(u_lo);
    }
    const double u_hi = std::max({1.0, d2, t}) + 40.0 / decay_rate_;
    std::vector<double> bp{u_lo, 1.0, u_hi};
    if (d2 > 0) bp.push_back(d2);
    if (t > 0) bp.push_back(t);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    bp.erase(std::remove_if(bp.begin(), bp.end(), [&](double u) { return u < u_lo || u > u_hi; }), bp.end());

    // integrand in s = log u (below 1) or in u (above 1); `mag` receives the
    // size of the uncancelled terms
    auto in_s = [&](double s, double* mag = nullptr) {
      const LogScaled v = op_->evaluate(t + std::exp(s), x, y, mag);
      const double w = std::exp(v.log_scale + half_ * s - log_gamma_half_);
      if (mag) *mag *= w;
      return v.mantissa * w;
    };
    auto in_u = [&](double u, double* mag = nullptr) {
      const LogScaled v = op_->evaluate(t + u, x, y, mag);
      const double w = std::exp(v.log_scale + (half_ - 1) * std::log(u) - log_gamma_half_);
      if (mag) *mag *= w;
      return v.mantissa * w;
    };

    // A fixed coarse rule estimates both the integral of |integrand| and of
    // the uncancelled terms; the tolerance is relative to the first but never
    // below the rounding noise implied by the second.
    static const QuadratureRule coarse = gauss_legendre(16);
    double scale = 0, noise = 0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const bool log_var = bp[i + 1] <= 1.0;
      const double a = log_var ? std::log(bp[i]) : bp[i], b = log_var ? std::log(bp[i + 1]) : bp[i + 1];
      const double h = 0.5 * (b - a), m = 0.5 * (a + b);
      for (std::size_t q = 0; q < coarse.size(); ++q) {
        const double s = m + h * coarse.nodes[q];
        double mag = 0;
        scale += h * coarse.weights[q] * std::fabs(log_var ? in_s(s, &mag) : in_u(s, &mag));
        noise += h * coarse.weights[q] * mag;
      }
    }
    if (scale == 0) return 0.0;
    const double tol = std::max(1e-11 * scale, 1e-13 * noise) / double(bp.size());
    static const AdaptiveIntegrator adapt;
    double total = 0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      if (bp[i + 1] <= 1.0)
        total += adapt.integrate([&](double s) { return in_s(s); }, std::log(bp[i]), std::log(bp[i + 1]), tol, 4, 14);
      else
        total += adapt.integrate([&](double u) { return in_u(u); }, bp[i], bp[i + 1], tol, 4, 14);
    }
    return total;
  }

 private:
  MultiOrder order_;
  std::vector<int> k_;
  KernelGradient grad_;
  std::size_t axis_;
  std::shared_ptr<KernelOperator> op_;
  double half_ = 0.5, log_gamma_half_ = 0, decay_rate_ = 1;
};

inline double riesz_kernel(const MultiOrder& order, std::span<const int> k, std::span<const double> x,
                           std::span<const double> y) {
  return RieszKernel(order, std::vector<int>(k.begin(), k.end()))(x, y);
}

inline double riesz_heat_composite_kernel(const MultiOrder& order, std::span<const int> k, double t,
                                          std::span<const double> x, std::span<const double> y) {
  return RieszKernel(order, std::vector<int>(k.begin(), k.end())).evaluate(t, x, y);
}

// --- Calderon-Zygmund verification -----------------------------------------------

/// Exponent in the off-diagonal decay factor (1 + d/rho(x) + d/rho(y))^{-gamma}:
/// nu_min + 1/2, or 2 when no axis is active (any fixed power is admissible
/// at the Hermite endpoint).
inline double riesz_decay_exponent(const MultiOrder& order) {
  return order.active_axes().empty() ? 2.0 : order.decay_exponent();
}

/// Size and gradient families for the Riesz kernel and its heat-regularized
/// version. Samples with x == y are inadmissible for the t = 0 kernels; the
/// t of each sample is used only by the regularized families.
inline std::vector<BoundFamily> riesz_bound_families(const MultiOrder& order, const std::vector<int>& k) {
  const double gamma = riesz_decay_exponent(order);
  const double n = double(order.dim());
  std::string tag = "[nu=";
  for (std::size_t j = 0; j < order.dim(); ++j) tag += (j ? "," : "") + std::to_string(order[j]).substr(0, 5);
  tag += ";k=" + SpectralCoefficients::key(k) + "]";

  auto size_bound = [=](const Sample& s) {
    const double d = std::sqrt(s.distance_squared());
    return -n * std::log(d) - gamma * log_critical_weight(order, d, s.x, s.y);
  };
  auto grad_bound = [=](bool at_x) {
    return [=](const Sample& s) {
      const double d = std::sqrt(s.distance_squared());
      const double r = rho(order, at_x ? s.x : s.y);
      return std::log(1.0 / r + 1.0 / d) - n * std::log(d) - gamma * log_critical_weight(order, d, s.x, s.y);
    };
  };
  auto off_diagonal = [](const Sample& s) { return s.distance_squared() > 0; };

  auto kernel = std::make_shared<RieszKernel>(order, k);
  std::vector<std::shared_ptr<RieszKernel>> gx, gy;
  for (std::size_t j = 0; j < order.dim(); ++j) {
    gx.push_back(std::make_shared<RieszKernel>(order, k, KernelGradient::x, j));
    gy.push_back(std::make_shared<RieszKernel>(order, k, KernelGradient::y, j));
  }
  auto log_abs = [](double v) { return v == 0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(v)); };
  auto max_grad = [=](const std::vector<std::shared_ptr<RieszKernel>>& ops, double t, const Sample& s) {
    double m = 0;
    for (const auto& op : ops) m = std::max(m, std::fabs(op->evaluate(t, s.x, s.y)));
    return log_abs(m);
  };

  std::vector<BoundFamily> out;
  out.push_back({"riesz.size" + tag, "|K(x,y)| <= C |x-y|^{-n} (1+|x-y|/rho(x)+|x-y|/rho(y))^{-gamma}", gamma, false,
                 [=](const Sample& s) { return log_abs((*kernel)(s.x, s.y)); }, size_bound, off_diagonal});
  out.push_back({"riesz.grad_y" + tag, "|d_y K| <= C (1/rho(y)+1/|x-y|) |x-y|^{-n} (...)^{-gamma}", gamma, false,
                 [=](const Sample& s) { return max_grad(gy, 0.0, s); }, grad_bound(false), off_diagonal});
  out.push_back({"riesz.grad_x" + tag, "|d_x K| <= C (1/rho(x)+1/|x-y|) |x-y|^{-n} (...)^{-gamma}", gamma, false,
                 [=](const Sample& s) { return max_grad(gx, 0.0, s); }, grad_bound(true), off_diagonal});
  out.push_back({"riesz_heat.size" + tag, "|K_t(x,y)| <= C |x-y|^{-n} (...)^{-gamma} uniformly in t", gamma, false,
                 [=](const Sample& s) { return log_abs(kernel->evaluate(s.t, s.x, s.y)); }, size_bound,
                 off_diagonal});
  out.push_back({"riesz_heat.grad_x" + tag, "|d_x K_t| <= C (1/rho(x)+1/|x-y|) |x-y|^{-n} (...)^{-gamma}", gamma,
                 false, [=](const Sample& s) { return max_grad(gx, s.t, s); }, grad_bound(true), off_diagonal});
  return out;
}

struct SmoothnessSpec {
  std::vector<Sample> samples;  // (x, y) pairs; t ignored
  double ratio_min = 1e-3;      // |y - y'| / |x - y| range of the regression
  double ratio_max = 0.05;
  int levels = 8;
  int jobs = 1;
};

/// Hoelder regularity |K(x,y) - K(x,y')| <= C (|y-y'|/|x-y|)^gamma |x-y|^{-n}
/// (and the same in x). For every ratio level r the largest normalized
/// difference over samples and perturbation directions is recorded; the
/// empirical exponent is the least-squares slope of log(max) against log r.
/// fitted_C uses gamma_nu over r in [ratio_min, 1/2].
inline BoundFitReport verify_cz_smoothness(const MultiOrder& order, const std::vector<int>& k,
                                           const SmoothnessSpec& spec) {
  if (spec.samples.empty()) throw UsageError("verify_cz_smoothness: empty sample set");
  if (!(spec.ratio_min > 0) || !(spec.ratio_min < spec.ratio_max) || !(spec.ratio_max <= 0.5) || spec.levels < 2)
    throw UsageError("verify_cz_smoothness: need 0 < ratio_min < ratio_max <= 1/2 and >= 2 levels");
  const RieszKernel kernel(order, k);
  const std::size_t n = order.dim();
  const double gamma = order.smoothness_exponent();
  auto ratios = log_spaced(spec.ratio_min, spec.ratio_max, spec.levels);
  ratios.push_back(0.5);  // enters the constant but not the regression

  // per sample, per ratio: max normalized difference over both variables and
  // all signed axis directions that stay inside the half-space
  std::vector<std::vector<double>> diff(spec.samples.size(), std::vector<double>(ratios.size(), 0.0));
  std::vector<int> bad(spec.samples.size(), 0);
  parallel_for(spec.samples.size(), spec.jobs, [&](std::size_t i) {
    const Sample& s = spec.samples[i];
    const double d = std::sqrt(s.distance_squared());
    if (!(d > 0)) return;
    const double k0 = kernel(s.x, s.y);
    const double norm = std::pow(d, double(n));
    for (std::size_t l = 0; l < ratios.size(); ++l) {
      const double h = ratios[l] * d;
      for (int var = 0; var < 2; ++var)
        for (std::size_t j = 0; j < n; ++j)
          for (double sign : {-1.0, 1.0}) {
            std::vector<double> x = s.x, y = s.y;
            auto& moved = var == 0 ? y : x;
            moved[j] += sign * h;
            if (!(moved[j] > 0)) continue;
            const double v = kernel(x, y);
            if (!std::isfinite(v)) {
              bad[i] = 1;
              continue;
            }
            diff[i][l] = std::max(diff[i][l], std::fabs(v - k0) * norm);
          }
    }
  });

  BoundFitReport rep;
  rep.family_id = "riesz.smoothness[k=" + SpectralCoefficients::key(k) + "]";
  rep.exponent_gamma = gamma;
  rep.n_samples = 0;
  std::vector<double> sup(ratios.size(), 0.0);
  double C = 0;
  for (std::size_t i = 0; i < spec.samples.size(); ++i) {
    if (!(spec.samples[i].distance_squared() > 0)) continue;
    ++rep.n_samples;
    if (bad[i]) rep.violations.push_back({spec.samples[i], std::numeric_limits<double>::quiet_NaN(), "kernel not finite"});
    for (std::size_t l = 0; l < ratios.size(); ++l) {
      sup[l] = std::max(sup[l], diff[i][l]);
      C = std::max(C, diff[i][l] / std::pow(ratios[l], gamma));
    }
  }
  // regression over the levels below ratio_max
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::size_t m = ratios.size() - 1;
  for (std::size_t l = 0; l < m; ++l) {
    const double lx = std::log(ratios[l]), ly = std::log(sup[l]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.fitted_C = C;
  rep.max_ratio = C;
  rep.extras["empirical_exponent"] = slope;
  rep.extras["smoothness_exponent"] = gamma;
  if (!(slope >= gamma - 0.05))
    rep.violations.push_back({spec.samples.front(), slope, "empirical Hoelder exponent below gamma - 0.05"});
  return rep;
}

}  // namespace laguerre
