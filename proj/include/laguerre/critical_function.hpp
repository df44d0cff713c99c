#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "laguerre/bound_fit.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/special_functions.hpp"

namespace laguerre {

/// Critical function of a single axis: min{1, 1/x}/16 at the Hermite endpoint,
/// min{x, 1/x}/16 otherwise.
inline double rho_axis(double nu_j, double x_j) {
  if (!(x_j > 0)) throw DomainError("rho: coordinates must be > 0");
  return (nu_j > -0.5 ? std::min(x_j, 1.0 / x_j) : std::min(1.0, 1.0 / x_j)) / 16.0;
}

/// rho_nu(x) = min{1/|x|, 1, x_j (nu_j > -1/2)} / 16.
inline double rho(const MultiOrder& order, std::span<const double> x) {
  if (x.size() != order.dim()) throw UsageError("rho: dimension mismatch");
  double norm2 = 0, m = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0)) throw DomainError("rho: coordinates must be > 0");
    norm2 += x[j] * x[j];
    if (order.is_active(j)) m = std::min(m, x[j]);
  }
  return std::min(m, 1.0 / std::sqrt(norm2)) / 16.0;
}

/// log(1 + sqrt(t)/rho(x) + sqrt(t)/rho(y)), the logarithm of the critical
/// weight appearing in the kernel bounds (t may be replaced by |x-y|^2).
inline double log_critical_weight(const MultiOrder& order, double scale, std::span<const double> x,
                                  std::span<const double> y) {
  return std::log1p(scale / rho(order, x) + scale / rho(order, y));
}

struct Ball {
  std::vector<double> center;
  double radius = 0;

  std::size_t dim() const { return center.size(); }
  double volume() const {
    const double n = double(center.size());
    return std::pow(std::numbers::pi, n / 2) / std::tgamma(n / 2 + 1) * std::pow(radius, n);
  }
  bool contains(std::span<const double> p, double slack = 0) const {
    double d = 0;
    for (std::size_t j = 0; j < p.size(); ++j) d += (p[j] - center[j]) * (p[j] - center[j]);
    return std::sqrt(d) < radius + slack;
  }
  void validate() const {
    if (!(radius > 0)) throw DomainError("Ball: radius must be > 0");
    for (double c : center)
      if (!(c > 0)) throw DomainError("Ball: center coordinates must be > 0");
  }
};

/// Axis-aligned box [lower, upper] in R^n_+.
struct Box {
  std::vector<double> lower, upper;

  std::size_t dim() const { return lower.size(); }
  void validate() const {
    if (lower.empty() || lower.size() != upper.size()) throw UsageError("Box: bounds must have equal, nonzero length");
    for (std::size_t j = 0; j < lower.size(); ++j)
      if (!(lower[j] > 0) || !(upper[j] > lower[j])) throw UsageError("Box: need 0 < lower < upper on every axis");
  }
  bool contains(std::span<const double> p) const {
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p[j] < lower[j] || p[j] > upper[j]) return false;
    return true;
  }
};

/// Exact minimum of rho over a box: the 1/|x| term is smallest at the upper
/// corner, the x_j terms at the lower face.
inline double rho_min_over_box(const MultiOrder& order, const Box& box) {
  double norm2 = 0, m = 1.0;
  for (std::size_t j = 0; j < box.dim(); ++j) {
    norm2 += box.upper[j] * box.upper[j];
    if (order.is_active(j)) m = std::min(m, box.lower[j]);
  }
  return std::min(m, 1.0 / std::sqrt(norm2)) / 16.0;
}

struct SlowVariationSpec {
  Box box;
  std::size_t pairs = 10000;
  unsigned long long seed = 1;
};

/// Samples x in the box and y uniformly in B(x, 4 rho(x)) and checks
/// rho(x)/2 <= rho(y) <= 2 rho(x). The claimed constant 2 is reported as
/// fitted_C; max_ratio is the largest observed max(rho(y)/rho(x), rho(x)/rho(y)).
inline BoundFitReport check_slow_variation(const MultiOrder& order, const SlowVariationSpec& spec) {
  spec.box.validate();
  if (spec.box.dim() != order.dim()) throw UsageError("check_slow_variation: dimension mismatch");
  const std::size_t n = order.dim();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  BoundFitReport rep;
  rep.family_id = "critical_function.slow_variation";
  rep.fitted_C = 2.0;
  rep.exponent_gamma = 0;
  std::vector<double> x(n), y(n), dir(n);
  std::size_t done = 0;
  while (done < spec.pairs) {
    for (std::size_t j = 0; j < n; ++j) {
      // log-uniform so that small coordinates (where rho is small) are well represented
      const double lo = std::log(spec.box.lower[j]), hi = std::log(spec.box.upper[j]);
      x[j] = std::exp(lo + (hi - lo) * unit(rng));
    }
    const double r = 4.0 * rho(order, x);
    double norm = 0;
    for (auto& d : dir) d = gauss(rng), norm += d * d;
    norm = std::sqrt(norm);
    const double radial = r * std::pow(unit(rng), 1.0 / double(n));
    bool inside = true;
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = x[j] + radial * dir[j] / norm;
      inside = inside && y[j] > 0;
    }
    if (!inside) continue;  // only pairs inside R^n_+ are admissible
    ++done;
    const double a = rho(order, x), b = rho(order, y);
    const double ratio = std::max(a / b, b / a);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (b < 0.5 * a || b > 2.0 * a) rep.violations.push_back({{0.0, x, y}, ratio, "rho ratio outside [1/2, 2]"});
  }
  rep.n_samples = long(done);
  return rep;
}

// --- covering ----------------------------------------------------------------

namespace detail {

/// Uniform bucket grid over points in R^n, n <= 3.
class PointHash {
 public:
  explicit PointHash(double cell) : cell_(cell) {}
  void insert(std::span<const double> p, std::size_t id) { buckets_[key(cell_of(p))].push_back(id); }
  /// Calls f(id) for every id within `reach` cells of p.
  template <class F>
  void visit(std::span<const double> p, int reach, F&& f) const {
    const auto c = cell_of(p);
    std::vector<std::int64_t> q(c.size());
    visit_rec(c, q, 0, reach, f);
  }

 private:
  std::vector<std::int64_t> cell_of(std::span<const double> p) const {
    std::vector<std::int64_t> c(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) c[j] = std::int64_t(std::floor(p[j] / cell_));
    return c;
  }
  static std::uint64_t key(const std::vector<std::int64_t>& c) {
    std::uint64_t k = 0;
    for (auto v : c) k = k * 2097152u + std::uint64_t(v + 1048576);
    return k;
  }
  template <class F>
  void visit_rec(const std::vector<std::int64_t>& c, std::vector<std::int64_t>& q, std::size_t axis, int reach,
                 F& f) const {
    if (axis == c.size()) {
      const auto it = buckets_.find(key(q));
      if (it != buckets_.end())
        for (auto id : it->second) f(id);
      return;
    }
    for (int d = -reach; d <= reach; ++d) {
      q[axis] = c[axis] + d;
      visit_rec(c, q, axis + 1, reach, f);
    }
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

inline double bump_profile(double u) {
  if (u >= 1.0) return 0.0;
  const double v = 1.0 - u * u;
  return v * v * v;
}

}  // namespace detail

/// Balls B(x_i, rho(x_i)) covering a box, with the smooth partition of unity
/// psi_i = b_i / sum_j b_j built from the bumps b_i = (1 - |x-x_i|^2/rho_i^2)^3.
class Covering {
 public:
  Covering(MultiOrder order, Box box, std::vector<Ball> balls)
      : order_(std::move(order)), box_(std::move(box)), balls_(std::move(balls)), index_(cell_size()) {
    for (std::size_t i = 0; i < balls_.size(); ++i) index_.insert(balls_[i].center, i);
  }

  const std::vector<Ball>& balls() const { return balls_; }
  const Box& box() const { return box_; }
  const MultiOrder& order() const { return order_; }

  /// Indices of balls whose open interior contains p.
  std::vector<std::size_t> balls_containing(std::span<const double> p) const {
    std::vector<std::size_t> out;
    index_.visit(p, 1, [&](std::size_t i) {
      if (balls_[i].contains(p)) out.push_back(i);
    });
    return out;
  }
  double bump(std::size_t i, std::span<const double> p) const {
    double d = 0;
    for (std::size_t j = 0; j < p.size(); ++j) d += (p[j] - balls_[i].center[j]) * (p[j] - balls_[i].center[j]);
    return detail::bump_profile(std::sqrt(d) / balls_[i].radius);
  }
  /// Nonzero partition-of-unity weights at p as (ball index, psi) pairs.
  std::vector<std::pair<std::size_t, double>> partition(std::span<const double> p) const {
    std::vector<std::pair<std::size_t, double>> out;
    double total = 0;
    for (auto i : balls_containing(p)) {
      const double b = bump(i, p);
      if (b > 0) out.emplace_back(i, b), total += b;
    }
    for (auto& [i, w] : out) w /= total;
    return out;
  }

 private:
  // Every radius is <= 1/16, so neighbouring cells of this size contain all
  // balls that can reach a point.
  static double cell_size() { return 1.0 / 16.0; }

  MultiOrder order_;
  Box box_;
  std::vector<Ball> balls_;
  detail::PointHash index_;
};

/// Greedy maximal family: starting from the box centre, sweep a lattice of
/// spacing min rho / 10 in lexicographic order and keep a candidate when its
/// fifth-radius ball misses all fifth-radius balls kept so far.
inline Covering build_covering(const MultiOrder& order, const Box& box, double margin = 0.05) {
  box.validate();
  if (box.dim() != order.dim()) throw UsageError("build_covering: dimension mismatch");
  if (box.dim() > 3) throw UsageError("build_covering: n <= 3 supported");
  if (!(margin > 0)) throw UsageError("build_covering: boundary margin must be > 0");
  for (double l : box.lower)
    if (l < margin) throw UsageError("build_covering: box must stay at least `margin` away from the boundary");

  const std::size_t n = box.dim();
  const double h = rho_min_over_box(order, box) / 10.0;
  std::vector<std::size_t> count(n);
  for (std::size_t j = 0; j < n; ++j)
    count[j] = std::size_t(std::ceil((box.upper[j] - box.lower[j]) / h)) + 1;

  std::vector<Ball> kept;
  detail::PointHash fifth(1.0 / 16.0 / 2.5);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = 0.5 * (box.lower[j] + box.upper[j]);
  fifth.insert(c, 0);
  kept.push_back({c, rho(order, c)});
  for (;;) {
    for (std::size_t j = 0; j < n; ++j)
      c[j] = box.lower[j] + (box.upper[j] - box.lower[j]) * double(idx[j]) / double(count[j] - 1);
    const double rc = rho(order, c);
    bool free = true;
    fifth.visit(c, 1, [&](std::size_t i) {
      if (!free) return;
      double d = 0;
      for (std::size_t j = 0; j < n; ++j) d += (c[j] - kept[i].center[j]) * (c[j] - kept[i].center[j]);
      if (std::sqrt(d) < (rc + kept[i].radius) / 5.0) free = false;
    });
    if (free) {
      fifth.insert(c, kept.size());
      kept.push_back({c, rc});
    }
    // lexicographic increment, last axis fastest
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (++idx[j] < count[j]) break;
      idx[j] = 0;
      if (j == 0) return Covering(order, box, std::move(kept));
    }
  }
}

struct CoveringCheck {
  std::size_t balls = 0;
  std::size_t points = 0;
  bool covers = false;
  bool fifth_disjoint = false;
  bool bumps_supported = false;
  std::size_t max_overlap = 0;
  double partition_error = 0;  // max |sum psi - 1|
  double psi_min = 0, psi_max = 0;

  bool passed() const { return covers && fifth_disjoint && bumps_supported && partition_error < 1e-12 && psi_min >= 0 && psi_max <= 1; }
};

/// Verifies the covering invariants on a tensor grid of `per_axis` points per
/// axis (corners included).
inline CoveringCheck verify_covering(const Covering& cov, std::size_t per_axis) {
  CoveringCheck chk;
  const auto& balls = cov.balls();
  const std::size_t n = cov.box().dim();
  chk.balls = balls.size();
  chk.fifth_disjoint = true;
  detail::PointHash centers(1.0 / 16.0 / 2.5);
  for (std::size_t i = 0; i < balls.size(); ++i) {
    centers.visit(balls[i].center, 1, [&](std::size_t k) {
      double d = 0;
      for (std::size_t j = 0; j < n; ++j) d += std::pow(balls[i].center[j] - balls[k].center[j], 2);
      if (std::sqrt(d) < (balls[i].radius + balls[k].radius) / 5.0) chk.fifth_disjoint = false;
    });
    centers.insert(balls[i].center, i);
  }
  chk.covers = true;
  chk.bumps_supported = true;
  chk.psi_min = 1, chk.psi_max = 0;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> p(n);
  for (;;) {
    for (std::size_t j = 0; j < n; ++j)
      p[j] = cov.box().lower[j] + (cov.box().upper[j] - cov.box().lower[j]) * double(idx[j]) / double(per_axis - 1);
    ++chk.points;
    const auto inside = cov.balls_containing(p);
    chk.max_overlap = std::max(chk.max_overlap, inside.size());
    if (inside.empty()) chk.covers = false;
    const auto part = cov.partition(p);
    double sum = 0;
    for (auto [i, w] : part) {
      sum += w;
      chk.psi_min = std::min(chk.psi_min, w);
      chk.psi_max = std::max(chk.psi_max, w);
      if (!balls[i].contains(p)) chk.bumps_supported = false;
    }
    chk.partition_error = std::max(chk.partition_error, std::fabs(sum - 1.0));
    std::size_t j = n;
    bool done = false;
    while (j > 0) {
      --j;
      if (++idx[j] < per_axis) break;
      idx[j] = 0;
      if (j == 0) done = true;
    }
    if (done) break;
  }
  return chk;
}

}  // namespace laguerre
