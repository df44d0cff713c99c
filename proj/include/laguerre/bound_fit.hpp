#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/parallel.hpp"

namespace laguerre {

/// One (t, x, y) sample. For time-independent kernels t is ignored.
struct Sample {
  double t = 0;
  std::vector<double> x, y;

  double distance_squared() const {
    double s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
    return s;
  }
};

struct Violation {
  Sample sample;
  double ratio = 0;
  std::string reason;
};

/// Outcome of fitting |LHS| <= C * RHS over a sample set.
struct BoundFitReport {
  std::string family_id;
  double fitted_C = std::numeric_limits<double>::quiet_NaN();
  double fixed_c = std::numeric_limits<double>::quiet_NaN();  // NaN when the family has no Gaussian factor
  double exponent_gamma = 0;
  long n_samples = 0;
  double max_ratio = 0;
  std::vector<Violation> violations;
  /// Family-specific diagnostics (minimal decay constant, empirical exponents, ...).
  std::map<std::string, double> extras;

  bool passed() const { return violations.empty() && std::isfinite(fitted_C); }
};

/// An inequality family |LHS(s)| <= C * base(s) * exp(-|x-y|^2/(c t)), all in
/// log form so that nothing underflows deep in the Gaussian tail.
struct BoundFamily {
  std::string id;
  std::string description;
  double exponent_gamma = 0;
  bool gaussian = true;
  std::function<double(const Sample&)> log_lhs;        // log|LHS|, -inf when LHS = 0
  std::function<double(const Sample&)> log_rhs_base;   // log of the bound without C and the Gaussian
  std::function<bool(const Sample&)> admissible;       // empty = every sample
};

struct FitOptions {
  std::optional<double> fixed_c;  // fit at this c instead of searching
  double c_lo = 1.0, c_hi = 8.0;
  /// A decay constant c is accepted when no sample exceeds `growth` times the
  /// largest ratio among near-diagonal samples (|x-y|^2/t <= near).
  double growth = 10.0;
  double near = 1.0;
  /// The near set always holds at least this fraction of the samples (regions
  /// that exclude the diagonal band otherwise leave it nearly empty).
  double near_fraction = 0.1;
  int jobs = 1;
};

namespace detail {

struct LogRatios {
  std::vector<double> base;  // log|LHS| - log(base)
  std::vector<double> s;     // |x-y|^2 / t
  std::vector<std::size_t> index;
};

inline double max_log_ratio(const LogRatios& r, double c, double near, bool near_only) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.base.size(); ++i) {
    if (near_only && r.s[i] > near) continue;
    m = std::max(m, r.base[i] + r.s[i] / c);
  }
  return m;
}

}  // namespace detail

/// Fits C (and, for Gaussian families, the smallest admissible decay constant
/// c in [c_lo, c_hi] by bisection) over the admissible samples.
inline BoundFitReport fit_gaussian_bound(const BoundFamily& family, const std::vector<Sample>& samples,
                                         const FitOptions& opt = {}) {
  std::vector<const Sample*> use;
  for (const auto& s : samples)
    if (!family.admissible || family.admissible(s)) use.push_back(&s);
  if (use.empty()) throw UsageError("fit_gaussian_bound: no admissible samples for " + family.id);

  std::vector<double> lhs(use.size()), rhs(use.size());
  parallel_for(use.size(), opt.jobs, [&](std::size_t i) {
    lhs[i] = family.log_lhs(*use[i]);
    rhs[i] = family.log_rhs_base(*use[i]);
  });

  BoundFitReport rep;
  rep.family_id = family.id;
  rep.exponent_gamma = family.exponent_gamma;
  rep.n_samples = long(use.size());

  detail::LogRatios r;
  for (std::size_t i = 0; i < use.size(); ++i) {
    if (std::isnan(lhs[i]) || lhs[i] == std::numeric_limits<double>::infinity()) {
      rep.violations.push_back({*use[i], std::numeric_limits<double>::quiet_NaN(), "left side not finite"});
      continue;
    }
    if (lhs[i] == -std::numeric_limits<double>::infinity()) continue;  // LHS = 0 satisfies any bound
    if (!std::isfinite(rhs[i])) {
      rep.violations.push_back({*use[i], std::numeric_limits<double>::infinity(), "bound vanishes where LHS != 0"});
      continue;
    }
    r.base.push_back(lhs[i] - rhs[i]);
    r.s.push_back(family.gaussian ? use[i]->distance_squared() / use[i]->t : 0.0);
    r.index.push_back(i);
  }
  if (r.base.empty()) {
    rep.fitted_C = 0;
    return rep;
  }

  double c = std::numeric_limits<double>::quiet_NaN();
  if (family.gaussian) {
    std::vector<double> sorted = r.s;
    const std::size_t q = std::min(sorted.size() - 1, std::size_t(opt.near_fraction * double(sorted.size())));
    std::nth_element(sorted.begin(), sorted.begin() + q, sorted.end());
    const double near = std::max(opt.near, sorted[q]);
    auto acceptable = [&](double cc) {
      return detail::max_log_ratio(r, cc, near, false) <=
             std::log(opt.growth) + detail::max_log_ratio(r, cc, near, true);
    };
    if (opt.fixed_c) {
      c = *opt.fixed_c;
    } else if (acceptable(opt.c_lo)) {
      c = opt.c_lo;
      rep.extras["min_decay_c"] = c;
    } else if (!acceptable(opt.c_hi)) {
      c = opt.c_hi;
      rep.extras["min_decay_c"] = std::numeric_limits<double>::quiet_NaN();
    } else {
      double lo = opt.c_lo, hi = opt.c_hi;
      while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        (acceptable(mid) ? hi : lo) = mid;
      }
      c = hi;
      rep.extras["min_decay_c"] = c;
    }
    rep.fixed_c = c;
  }

  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < r.base.size(); ++i) {
    const double v = r.base[i] + (family.gaussian ? r.s[i] / c : 0.0);
    if (v > best) best = v, arg = i;
  }
  rep.max_ratio = std::exp(best);
  rep.fitted_C = rep.max_ratio;
  if (!std::isfinite(rep.fitted_C))
    rep.violations.push_back({*use[r.index[arg]], rep.max_ratio, "ratio overflows"});
  if (family.gaussian && !opt.fixed_c && std::isnan(rep.extras["min_decay_c"]))
    rep.violations.push_back({*use[r.index[arg]], rep.max_ratio, "no decay constant in range absorbs the tail"});
  return rep;
}

// --- sample generators -------------------------------------------------------

inline std::vector<double> log_spaced(double a, double b, int n) {
  if (n < 1 || !(a > 0) || !(b >= a)) throw UsageError("log_spaced: need 0 < a <= b and n >= 1");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a * std::pow(b / a, double(i) / (n - 1));
  return v;
}

/// x_i = hi * i / n for i = 1..n.
inline std::vector<double> uniform_points(double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = hi * (i + 1) / n;
  return v;
}

/// All (t, x, y) with x, y drawn from `points` (1-D).
inline std::vector<Sample> grid_samples_1d(const std::vector<double>& times, const std::vector<double>& points) {
  std::vector<Sample> out;
  out.reserve(times.size() * points.size() * points.size());
  for (double t : times)
    for (double x : points)
      for (double y : points) out.push_back({t, {x}, {y}});
  return out;
}

/// Seeded uniform samples in [lo, hi]^n with log-uniform t in [t_lo, t_hi].
inline std::vector<Sample> random_samples(std::size_t n_dim, double lo, double hi, double t_lo, double t_hi,
                                          std::size_t count, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo, hi), ut(std::log(t_lo), std::log(t_hi));
  std::vector<Sample> out(count);
  for (auto& s : out) {
    s.t = std::exp(ut(rng));
    s.x.resize(n_dim);
    s.y.resize(n_dim);
    for (std::size_t j = 0; j < n_dim; ++j) s.x[j] = ux(rng), s.y[j] = ux(rng);
  }
  return out;
}

}  // namespace laguerre
