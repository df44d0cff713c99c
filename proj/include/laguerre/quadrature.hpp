#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "laguerre/errors.hpp"

namespace laguerre {

/// Nodes and weights of a 1-D quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw UsageError("gauss_legendre: need at least one node");
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

/// Copies `base` (on [-1,1]) onto each panel [b_i, b_{i+1}].
inline QuadratureRule composite_rule(const std::vector<double>& breakpoints, const QuadratureRule& base) {
  QuadratureRule r;
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double a = breakpoints[p], b = breakpoints[p + 1];
    if (!(b > a)) continue;
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    for (std::size_t i = 0; i < base.size(); ++i) {
      r.nodes.push_back(m + h * base.nodes[i]);
      r.weights.push_back(h * base.weights[i]);
    }
  }
  return r;
}

/// Composite rule on [0, x_max]: uniform panels of width `panel`, the first
/// panel subdivided geometrically (`grading` halvings) to resolve x^{nu+1/2}
/// behaviour at the origin.
inline QuadratureRule half_line_rule(double x_max, double panel, int nodes_per_panel, int grading = 8) {
  if (!(x_max > 0) || !(panel > 0)) throw UsageError("half_line_rule: x_max and panel must be > 0");
  const int panels = std::max(1, int(std::ceil(x_max / panel - 1e-12)));
  const double h = x_max / panels;
  std::vector<double> bp{0.0};
  for (int g = grading; g >= 1; --g) bp.push_back(h * std::ldexp(1.0, -g));
  for (int p = 1; p <= panels; ++p) bp.push_back(p == panels ? x_max : p * h);
  return composite_rule(bp, gauss_legendre(nodes_per_panel));
}

/// Uniform composite Gauss-Legendre on [a, b].
inline QuadratureRule interval_rule(double a, double b, int panels, int nodes_per_panel) {
  std::vector<double> bp(panels + 1);
  for (int p = 0; p <= panels; ++p) bp[p] = a + (b - a) * p / panels;
  return composite_rule(bp, gauss_legendre(nodes_per_panel));
}

/// Globally adaptive Gauss-Legendre: each panel is estimated with a 10- and a
/// 20-point rule and bisected until the difference is below its share of
/// `abs_tol`.
class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator() : low_(gauss_legendre(10)), high_(gauss_legendre(20)) {}

  template <class F>
  double integrate(F&& f, double a, double b, double abs_tol, int initial_panels = 4, int max_depth = 16) const {
    double total = 0;
    const double w = (b - a) / initial_panels;
    for (int p = 0; p < initial_panels; ++p)
      total += panel(f, a + p * w, a + (p + 1) * w, abs_tol / initial_panels, max_depth);
    return total;
  }

 private:
  template <class F>
  double apply(const QuadratureRule& r, F& f, double a, double b) const {
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    double s = 0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(m + h * r.nodes[i]);
    return h * s;
  }
  template <class F>
  double panel(F& f, double a, double b, double tol, int depth) const {
    const double lo = apply(low_, f, a, b), hi = apply(high_, f, a, b);
    if (std::fabs(hi - lo) <= tol || depth == 0) return hi;
    const double m = 0.5 * (a + b);
    return panel(f, a, m, 0.5 * tol, depth - 1) + panel(f, m, b, 0.5 * tol, depth - 1);
  }

  QuadratureRule low_, high_;
};

}  // namespace laguerre
