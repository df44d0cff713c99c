#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "laguerre/bound_fit.hpp"
#include "laguerre/critical_function.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/grid.hpp"
#include "laguerre/operators.hpp"
#include "laguerre/parallel.hpp"
#include "laguerre/quadrature.hpp"

namespace laguerre {

using ScalarField = std::function<double(std::span<const double>)>;

// --- quadrature on balls -----------------------------------------------------

/// Nodes and weights of a quadrature over one ball. `index` maps nodes back to
/// a GridFunction when the rule was cut out of a tensor grid.
struct BallRule {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
  std::vector<std::size_t> index;

  double measure() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Quadrature over a ball: Gauss-Legendre on the interval (n = 1), polar
/// coordinates exact for polynomials of degree < 4*radial (n = 2), and the
/// masked tensor rule in higher dimensions.
inline BallRule ball_rule(const Ball& b, int radial = 16) {
  b.validate();
  if (radial < 2) throw UsageError("ball_rule: need at least 2 radial nodes");
  BallRule r;
  const std::size_t n = b.dim();
  const double c0 = b.center[0], R = b.radius;
  if (n == 1) {
    const QuadratureRule q = interval_rule(c0 - R, c0 + R, 2, radial);
    for (std::size_t i = 0; i < q.size(); ++i) r.nodes.push_back({q.nodes[i]}), r.weights.push_back(q.weights[i]);
    return r;
  }
  if (n == 2) {
    const QuadratureRule q = interval_rule(0, R, 1, radial);
    const int angles = 4 * radial;
    for (std::size_t i = 0; i < q.size(); ++i)
      for (int a = 0; a < angles; ++a) {
        const double th = 2 * std::numbers::pi * (a + 0.5) / angles;
        r.nodes.push_back({c0 + q.nodes[i] * std::cos(th), b.center[1] + q.nodes[i] * std::sin(th)});
        r.weights.push_back(q.weights[i] * q.nodes[i] * 2 * std::numbers::pi / angles);
      }
    return r;
  }
  TensorGrid g;
  for (std::size_t j = 0; j < n; ++j) g.axes.push_back(interval_rule(b.center[j] - R, b.center[j] + R, 2, radial));
  std::vector<double> p(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, p);
    if (b.contains(p)) r.nodes.push_back(p), r.weights.push_back(g.weight(i));
  }
  return r;
}

/// The nodes of `g` inside `b`, with their tensor weights.
inline BallRule grid_rule(const TensorGrid& g, const Ball& b) {
  if (g.dim() != b.dim()) throw UsageError("grid_rule: dimension mismatch");
  BallRule r;
  std::vector<double> p(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, p);
    if (b.contains(p)) r.nodes.push_back(p), r.weights.push_back(g.weight(i)), r.index.push_back(i);
  }
  return r;
}

// --- minimizing polynomials --------------------------------------------------

/// All multi-indices of length n with |alpha| <= M, graded.
inline std::vector<std::vector<int>> monomial_indices(std::size_t n, int M) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  for (int total = 0; total <= M; ++total) {
    auto rec = [&](auto&& self, std::size_t axis, int left) -> void {
      if (axis + 1 == n) {
        a[axis] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[axis] = v;
        self(self, axis + 1, left - v);
      }
    };
    rec(rec, 0, total);
  }
  return out;
}

/// Degree-<=M polynomial matching the moments of g on a ball. Coefficients
/// are stored in the basis ((x - x_B)/r_B)^alpha, which keeps the Gram matrix
/// well conditioned for tiny balls.
struct PolynomialFit {
  int degree = 0;
  Ball ball;
  std::map<std::vector<int>, double> coefficients;
  double condition_number = 1;
  /// max over |alpha| <= M of |int_B (g - P) m_alpha| / ||g||_{L^1(B)}, with
  /// m_alpha the scaled monomials (|m_alpha| <= 1 on B).
  double relative_residual = 0;

  double evaluate(std::span<const double> x) const {
    double s = 0;
    for (const auto& [a, c] : coefficients) {
      double m = c;
      for (std::size_t j = 0; j < a.size(); ++j) m *= std::pow((x[j] - ball.center[j]) / ball.radius, a[j]);
      s += m;
    }
    return s;
  }

  /// d^beta P(x) in the original variables.
  double derivative(std::span<const int> beta, std::span<const double> x) const {
    double s = 0;
    for (const auto& [a, c] : coefficients) {
      double m = c;
      for (std::size_t j = 0; j < a.size() && m != 0; ++j) {
        if (beta[j] > a[j]) {
          m = 0;
          break;
        }
        for (int i = 0; i < beta[j]; ++i) m *= double(a[j] - i) / ball.radius;
        m *= std::pow((x[j] - ball.center[j]) / ball.radius, a[j] - beta[j]);
      }
      s += m;
    }
    return s;
  }
};

namespace detail {

inline double scaled_monomial(const std::vector<int>& a, std::span<const double> x, const Ball& b) {
  double m = 1;
  for (std::size_t j = 0; j < a.size(); ++j) m *= std::pow((x[j] - b.center[j]) / b.radius, a[j]);
  return m;
}

}  // namespace detail

/// Solves the Gram system of scaled monomial moments on `rule`; g holds the
/// values at the rule's nodes.
inline PolynomialFit minimizing_polynomial(const BallRule& rule, std::span<const double> g, const Ball& b, int M) {
  if (M < 0) throw UsageError("minimizing_polynomial: degree must be >= 0");
  if (g.size() != rule.nodes.size()) throw UsageError("minimizing_polynomial: one value per node required");
  const auto idx = monomial_indices(b.dim(), M);
  const std::size_t m = idx.size();
  if (rule.nodes.size() < m) throw UsageError("minimizing_polynomial: quadrature has fewer nodes than monomials");
  Eigen::MatrixXd basis(rule.nodes.size(), m);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    for (std::size_t a = 0; a < m; ++a) basis(i, a) = detail::scaled_monomial(idx[a], rule.nodes[i], b);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), Eigen::Index(rule.weights.size()));
  const Eigen::Map<const Eigen::VectorXd> gv(g.data(), Eigen::Index(g.size()));
  const Eigen::MatrixXd gram = basis.transpose() * w.asDiagonal() * basis;
  const Eigen::VectorXd rhs = basis.transpose() * (w.cwiseProduct(gv));
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw DomainError("minimizing_polynomial: Gram matrix is not positive definite");
  const Eigen::VectorXd coef = llt.solve(rhs);

  PolynomialFit fit;
  fit.degree = M;
  fit.ball = b;
  for (std::size_t a = 0; a < m; ++a) fit.coefficients[idx[a]] = coef(Eigen::Index(a));
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  fit.condition_number = ev.maxCoeff() / ev.minCoeff();
  const Eigen::VectorXd resid = basis.transpose() * w.cwiseProduct(gv - basis * coef);
  const double l1 = w.dot(gv.cwiseAbs());
  fit.relative_residual = l1 > 0 ? resid.cwiseAbs().maxCoeff() / l1 : resid.cwiseAbs().maxCoeff();
  return fit;
}

inline PolynomialFit minimizing_polynomial(const ScalarField& g, const Ball& b, int M, int radial = 16) {
  const BallRule rule = ball_rule(b, std::max(radial, M + 2));
  std::vector<double> v(rule.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(rule.nodes[i]);
  return minimizing_polynomial(rule, v, b, M);
}

inline PolynomialFit minimizing_polynomial(const GridFunction& g, const Ball& b, int M) {
  const BallRule rule = grid_rule(g.grid, b);
  std::vector<double> v(rule.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.values[rule.index[i]];
  return minimizing_polynomial(rule, v, b, M);
}

// --- atoms -------------------------------------------------------------------

/// floor(n (1/p - 1)), the number of vanishing moments required of small atoms.
inline int atom_moment_order(std::size_t n, double p) {
  if (!(p > 0 && p <= 1)) throw UsageError("atom: exponent p must lie in (0, 1]");
  return int(std::floor(double(n) * (1 / p - 1) + 1e-12));
}

/// Lower end n/(n + gamma) of the admissible exponent range (0 at the Hermite
/// endpoint, where every p in (0, 1] is admissible).
inline double critical_exponent(const MultiOrder& order) {
  const double g = order.decay_exponent(), n = double(order.dim());
  return std::isfinite(g) ? n / (n + g) : 0.0;
}

struct Atom {
  Ball ball;
  double p = 1;
  int moment_order = 0;
  GridFunction values;  // on a grid covering the ball, zero outside it
};

/// Gauss-Legendre tensor grid over the bounding cube of a ball; panel
/// boundaries pass through the centre.
inline TensorGrid atom_grid(const Ball& b, int panels = 2, int nodes_per_panel = 16) {
  b.validate();
  if (panels < 1 || panels % 2) throw UsageError("atom_grid: need an even number of panels");
  TensorGrid g;
  for (std::size_t j = 0; j < b.dim(); ++j)
    g.axes.push_back(interval_rule(b.center[j] - b.radius, b.center[j] + b.radius, panels, nodes_per_panel));
  return g;
}

struct AtomCheck {
  bool support = true, size = true, moments = true;
  bool moments_required = false;
  double sup_ratio = 0;       // sup|a| / |B|^{-1/p}
  double worst_moment = 0;    // max |int a x^alpha| / (||a||_1 max_B |x^alpha|)
  std::vector<std::string> warnings;

  bool valid() const { return support && size && moments; }
};

inline AtomCheck check_atom(const Atom& a, const MultiOrder& order) {
  const int N = atom_moment_order(a.ball.dim(), a.p);
  a.ball.validate();
  if (a.ball.dim() != order.dim() || a.values.grid.dim() != order.dim())
    throw UsageError("check_atom: dimension mismatch");
  for (std::size_t j = 0; j < a.ball.dim(); ++j)
    if (!(a.ball.center[j] - a.ball.radius > 0)) throw DomainError("check_atom: ball leaves the half-space");

  AtomCheck out;
  const double bound = std::pow(a.ball.volume(), -1 / a.p);
  const double sup = a.values.sup_norm();
  out.sup_ratio = sup / bound;
  out.size = sup <= bound * (1 + 1e-12);

  std::vector<double> x(order.dim());
  double l1 = 0;
  for (std::size_t i = 0; i < a.values.values.size(); ++i) {
    a.values.grid.point(i, x);
    const double v = a.values.values[i];
    if (!a.ball.contains(x, 1e-12 * a.ball.radius) && std::fabs(v) > 1e-14 * sup) out.support = false;
    l1 += a.values.grid.weight(i) * std::fabs(v);
  }

  const double rho_c = rho(order, a.ball.center);
  out.moments_required = a.ball.radius < rho_c;
  if (!out.moments_required) {
    if (a.ball.radius > rho_c) out.warnings.push_back("radius exceeds rho at the centre; such atoms may be split");
  } else {
    for (const auto& alpha : monomial_indices(order.dim(), N)) {
      double m = 0, scale = 1;
      for (std::size_t i = 0; i < a.values.values.size(); ++i) {
        if (a.values.values[i] == 0.0) continue;
        a.values.grid.point(i, x);
        double xa = 1;
        for (std::size_t j = 0; j < x.size(); ++j) xa *= std::pow(x[j], alpha[j]);
        m += a.values.grid.weight(i) * a.values.values[i] * xa;
      }
      for (std::size_t j = 0; j < x.size(); ++j)
        scale *= std::pow(a.ball.center[j] + a.ball.radius, alpha[j]);
      const double rel = l1 > 0 ? std::fabs(m) / (l1 * std::max(1.0, scale)) : 0.0;
      out.worst_moment = std::max(out.worst_moment, rel);
      if (rel > 1e-10) out.moments = false;
    }
  }
  if (a.moment_order != N) out.warnings.push_back("stored moment order differs from floor(n(1/p-1))");
  if (a.p <= critical_exponent(order)) out.warnings.push_back("p is below the admissible range n/(n+gamma)");
  return out;
}

/// A random smooth atom: four Gaussian bumps centred in the ball, moments up
/// to floor(n(1/p-1)) projected out when r < rho(centre) (through the same
/// Gram system as minimizing_polynomial), scaled to sup = |B|^{-1/p}. The
/// draw depends only on the seed, so refining the grid resamples the same atom.
inline Atom random_atom(const MultiOrder& order, const Ball& b, double p, unsigned long long seed, int panels = 2,
                        int nodes_per_panel = 16) {
  const int N = atom_moment_order(b.dim(), p);
  if (b.dim() != order.dim()) throw UsageError("random_atom: dimension mismatch");
  const std::size_t n = b.dim();
  const TensorGrid g = atom_grid(b, panels, nodes_per_panel);
  const BallRule rule = grid_rule(g, b);
  const bool project = b.radius < rho(order, b.center);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * attempt);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(-1, 1), uw(0.3, 1.0);
    struct Bump {
      std::vector<double> z;
      double w, c;
    };
    std::vector<Bump> bumps;
    while (bumps.size() < 4) {
      std::vector<double> z(n);
      double d = 0;
      for (auto& v : z) v = u(rng), d += v * v;
      if (d >= 1) continue;
      for (std::size_t j = 0; j < n; ++j) z[j] = b.center[j] + b.radius * z[j];
      const double w = uw(rng) * b.radius, c = nd(rng);
      bumps.push_back({std::move(z), w, c});
    }
    std::vector<double> v(rule.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double s = 0;
      for (const auto& bp : bumps) {
        double d = 0;
        for (std::size_t j = 0; j < n; ++j) d += std::pow(rule.nodes[i][j] - bp.z[j], 2);
        s += bp.c * std::exp(-d / (bp.w * bp.w));
      }
      v[i] = s;
    }
    double before = 0;
    for (double x : v) before = std::max(before, std::fabs(x));
    if (project) {
      const PolynomialFit P = minimizing_polynomial(rule, v, b, N);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= P.evaluate(rule.nodes[i]);
    }
    double sup = 0;
    for (double x : v) sup = std::max(sup, std::fabs(x));
    if (!(sup > 1e-8 * before)) continue;
    const double scale = std::pow(b.volume(), -1 / p) / sup;
    Atom a{b, p, N, GridFunction(g)};
    for (std::size_t i = 0; i < v.size(); ++i) a.values.values[rule.index[i]] = v[i] * scale;
    return a;
  }
  throw DomainError("random_atom: moment projection annihilated every draw");
}

/// Balls with centres uniform in `box` and radii uniform in
/// [r_lo, r_hi] * rho(centre), kept only if they lie inside the box.
inline std::vector<Ball> random_balls(const MultiOrder& order, const Box& box, std::size_t count,
                                      unsigned long long seed, double r_lo = 0.125, double r_hi = 1.0) {
  box.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Ball> out;
  for (std::size_t tries = 0; out.size() < count; ++tries) {
    if (tries > 1000 * count) throw UsageError("random_balls: box too small for the requested radii");
    Ball b;
    b.center.resize(box.dim());
    for (std::size_t j = 0; j < box.dim(); ++j) b.center[j] = box.lower[j] + u(rng) * (box.upper[j] - box.lower[j]);
    b.radius = (r_lo + u(rng) * (r_hi - r_lo)) * rho(order, b.center);
    bool inside = true;
    for (std::size_t j = 0; j < box.dim(); ++j)
      inside = inside && b.center[j] - b.radius >= box.lower[j] && b.center[j] + b.radius <= box.upper[j];
    if (inside) out.push_back(std::move(b));
  }
  return out;
}

// --- norms -------------------------------------------------------------------

enum class NormKind { hardy_maximal, bmo };

inline const char* to_string(NormKind k) { return k == NormKind::hardy_maximal ? "hardy_maximal" : "bmo"; }

struct BallStatistics {
  std::size_t balls = 0, small = 0, large = 0;  // small: r_B < rho(x_B)
  double small_sup = 0, large_sup = 0;
  Ball argmax;
};

struct NormReport {
  NormKind kind = NormKind::bmo;
  double value = 0;
  std::map<std::string, double> parameters;
  BallStatistics balls;
};

/// ||M f||_{L^p} on f's grid via the spectral maximal function.
inline NormReport hardy_norm_maximal(const GridFunction& f, const MultiOrder& order, double p,
                                     const std::vector<double>& t_grid, int k_max = -1) {
  if (!(p > 0 && p <= 1)) throw UsageError("hardy_norm_maximal: p must lie in (0, 1]");
  NormReport r;
  r.kind = NormKind::hardy_maximal;
  r.parameters = {{"p", p}, {"times", double(t_grid.size())}};
  r.value = maximal_function(f, order, t_grid, k_max).lp_norm(p);
  return r;
}

/// Evaluation grid for the maximal function of a localized function: panels
/// graded geometrically (ratio 2, `near_levels` levels) around the ball and
/// of width `far_panel` elsewhere on (0, x_max].
struct MaximalEvalSpec {
  double x_max = 12.0;
  double far_panel = 0.5;
  int near_levels = 8;
  int nodes_per_panel = 8;
  int jobs = 1;
};

inline QuadratureRule maximal_eval_axis(double centre, double radius, const MaximalEvalSpec& spec) {
  std::vector<double> bp{0.0, spec.x_max};
  for (double x = spec.far_panel; x < spec.x_max; x += spec.far_panel) bp.push_back(x);
  // inside the graded zone the far breakpoints are replaced by the graded ones
  const double reach = radius * std::ldexp(1.0, spec.near_levels);
  std::erase_if(bp, [&](double x) { return x > 0 && x < spec.x_max && std::fabs(x - centre) < reach; });
  bp.push_back(centre);
  for (int k = 0; k <= spec.near_levels; ++k) {
    const double d = radius * std::ldexp(1.0, k);
    if (centre - d > 0) bp.push_back(centre - d);
    if (centre + d < spec.x_max) bp.push_back(centre + d);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return composite_rule(bp, gauss_legendre(spec.nodes_per_panel));
}

/// ||M a||_{L^p(R^n_+)} for an atom, by axis-wise heat-kernel quadrature
/// onto a tensor grid graded around the atom's ball; t_grid holds tau with
/// t = tau^2, as in maximal_function.
inline NormReport hardy_norm_maximal(const Atom& a, const MultiOrder& order, const std::vector<double>& t_grid,
                                     const MaximalEvalSpec& spec = {}) {
  TensorGrid eval;
  for (std::size_t j = 0; j < order.dim(); ++j)
    eval.axes.push_back(maximal_eval_axis(a.ball.center[j], a.ball.radius, spec));
  NormReport r;
  r.kind = NormKind::hardy_maximal;
  r.value = maximal_function_on(a.values, order, t_grid, eval, spec.jobs).lp_norm(a.p);
  r.parameters = {{"p", a.p}, {"times", double(t_grid.size())}, {"radius", a.ball.radius}};
  r.balls.balls = 1;
  r.balls.argmax = a.ball;
  return r;
}

/// Deterministic multiscale family: centres on a lattice of `per_axis` points
/// per axis inside the box, radii {1/8, 1/4, 1/2, 1, 2} * rho(centre); balls
/// leaving the box are dropped.
inline std::vector<Ball> multiscale_ball_family(const MultiOrder& order, const Box& box, int per_axis = 6) {
  box.validate();
  if (per_axis < 1) throw UsageError("multiscale_ball_family: need at least one centre per axis");
  const std::size_t n = box.dim();
  std::vector<Ball> out;
  std::vector<int> idx(n, 0);
  for (;;) {
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j)
      c[j] = box.lower[j] + (box.upper[j] - box.lower[j]) * (idx[j] + 0.5) / per_axis;
    const double r0 = rho(order, c);
    for (double f : {0.125, 0.25, 0.5, 1.0, 2.0}) {
      bool inside = true;
      for (std::size_t j = 0; j < n; ++j)
        inside = inside && c[j] - f * r0 >= box.lower[j] && c[j] + f * r0 <= box.upper[j];
      if (inside) out.push_back({c, f * r0});
    }
    std::size_t j = 0;
    while (j < n && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == n) break;
  }
  return out;
}

namespace detail {

/// Per-ball Campanato term. `values` are f at the rule's nodes.
inline double campanato_term(const BallRule& rule, std::vector<double> values, const Ball& b, bool small, double s,
                             double q, int M) {
  if (small) {
    const PolynomialFit P = minimizing_polynomial(rule, values, b, M);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= P.evaluate(rule.nodes[i]);
  }
  double acc = 0, meas = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += rule.weights[i] * std::pow(std::fabs(values[i]), q);
    meas += rule.weights[i];
  }
  return std::pow(b.volume(), -s / double(b.dim())) * std::pow(acc / meas, 1 / q);
}

inline NormReport bmo_sweep(const MultiOrder& order, double s, double q, int M, const std::vector<Ball>& family,
                            int jobs, const std::function<double(const Ball&, bool)>& term) {
  if (family.empty()) throw UsageError("bmo_norm: empty ball family");
  if (!(s >= 0)) throw UsageError("bmo_norm: s must be >= 0");
  if (!(q >= 1) || !std::isfinite(q)) throw UsageError("bmo_norm: q must lie in [1, inf)");
  if (M < 0 || (s > 0 && M < int(std::floor(s)))) throw UsageError("bmo_norm: need M >= floor(s)");
  std::vector<double> v(family.size());
  std::vector<char> small(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].dim() != order.dim()) throw UsageError("bmo_norm: ball dimension mismatch");
    small[i] = family[i].radius < rho(order, family[i].center);
  }
  parallel_for(family.size(), jobs, [&](std::size_t i) { v[i] = term(family[i], small[i]); });
  NormReport r;
  r.kind = NormKind::bmo;
  r.parameters = {{"s", s}, {"q", q}, {"M", double(M)}};
  double best = -1;
  for (std::size_t i = 0; i < family.size(); ++i) {
    auto& st = r.balls;
    ++st.balls;
    (small[i] ? st.small : st.large) += 1;
    double& sup = small[i] ? st.small_sup : st.large_sup;
    sup = std::max(sup, v[i]);
    if (v[i] > best) best = v[i], st.argmax = family[i];
  }
  r.value = r.balls.small_sup + r.balls.large_sup;
  return r;
}

}  // namespace detail

/// Campanato norm over a ball family: the supremum over small balls
/// (r_B < rho(x_B)) of |B|^{-s/n} (avg_B |f - P_B^M f|^q)^{1/q} plus the
/// supremum over the remaining balls of |B|^{-s/n} (avg_B |f|^q)^{1/q}.
inline NormReport bmo_norm(const ScalarField& f, const MultiOrder& order, double s, double q, int M,
                           const std::vector<Ball>& family, int radial = 16, int jobs = 1) {
  return detail::bmo_sweep(order, s, q, M, family, jobs, [&](const Ball& b, bool small) {
    const BallRule rule = ball_rule(b, std::max(radial, M + 2));
    std::vector<double> v(rule.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(rule.nodes[i]);
    return detail::campanato_term(rule, std::move(v), b, small, s, q, M);
  });
}

/// As above with f sampled on a grid; each ball uses the grid nodes inside it.
inline NormReport bmo_norm(const GridFunction& f, const MultiOrder& order, double s, double q, int M,
                           const std::vector<Ball>& family, int jobs = 1) {
  return detail::bmo_sweep(order, s, q, M, family, jobs, [&](const Ball& b, bool small) {
    const BallRule rule = grid_rule(f.grid, b);
    if (rule.nodes.empty()) throw UsageError("bmo_norm: a ball contains no grid nodes");
    std::vector<double> v(rule.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.values[rule.index[i]];
    return detail::campanato_term(rule, std::move(v), b, small, s, q, M);
  });
}

/// int f a, by the atom's own quadrature.
inline double duality_pairing(const ScalarField& f, const Atom& a) {
  double s = 0;
  std::vector<double> x(a.values.grid.dim());
  for (std::size_t i = 0; i < a.values.values.size(); ++i) {
    if (a.values.values[i] == 0.0) continue;
    a.values.grid.point(i, x);
    s += a.values.grid.weight(i) * a.values.values[i] * f(x);
  }
  return s;
}

inline double duality_pairing(const GridFunction& f, const Atom& a) {
  if (f.values.size() != a.values.values.size()) throw UsageError("duality_pairing: grids differ");
  return f.inner(a.values);
}

/// Seeded smooth test function on R^n_+: a constant, a linear term and three
/// Gaussian bumps of random sign, width and position in [0.2, 3]^n.
inline ScalarField random_field(std::size_t n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> uz(0.2, 3.0), uw(0.1, 1.0);
  struct Term {
    std::vector<double> z;
    double w, c;
  };
  const double c0 = nd(rng);
  std::vector<double> lin(n);
  for (auto& v : lin) v = 0.3 * nd(rng);
  std::vector<Term> terms(3);
  for (auto& t : terms) {
    t.z.resize(n);
    for (auto& v : t.z) v = uz(rng);
    t.w = uw(rng);
    t.c = nd(rng);
  }
  return [=](std::span<const double> x) {
    double s = c0;
    for (std::size_t j = 0; j < n; ++j) s += lin[j] * x[j];
    for (const auto& t : terms) {
      double d = 0;
      for (std::size_t j = 0; j < n; ++j) d += (x[j] - t.z[j]) * (x[j] - t.z[j]);
      s += t.c * std::exp(-d / (t.w * t.w));
    }
    return s;
  };
}

}  // namespace laguerre
