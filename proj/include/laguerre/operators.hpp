#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/grid.hpp"
#include "laguerre/heat_kernel.hpp"
#include "laguerre/parallel.hpp"
#include "laguerre/special_functions.hpp"

namespace laguerre {

/// Default spectral truncation (total degree) by dimension.
inline int default_k_max(std::size_t n) { return n == 1 ? 60 : n == 2 ? 40 : 24; }

/// Coefficients <f, phi_k^nu> for |k| <= k_max, stored densely over
/// {0..k_max}^n with entries of total degree > k_max kept at zero.
class SpectralCoefficients {
 public:
  SpectralCoefficients(MultiOrder order, int k_max)
      : order_(std::move(order)), k_max_(k_max), data_(ipow(k_max + 1, order_.dim()), 0.0) {
    if (k_max < 0 || k_max > 200) throw UsageError("SpectralCoefficients: k_max must lie in [0, 200]");
  }

  const MultiOrder& order() const { return order_; }
  int k_max() const { return k_max_; }
  std::size_t dim() const { return order_.dim(); }

  std::size_t flat(std::span<const int> k) const {
    std::size_t f = 0;
    for (int v : k) f = f * (k_max_ + 1) + std::size_t(v);
    return f;
  }
  bool in_range(std::span<const int> k) const {
    if (k.size() != dim()) return false;
    int total = 0;
    for (int v : k) {
      if (v < 0 || v > k_max_) return false;
      total += v;
    }
    return total <= k_max_;
  }
  double at(std::span<const int> k) const { return in_range(k) ? data_[flat(k)] : 0.0; }
  void set(std::span<const int> k, double v) {
    if (!in_range(k)) throw UsageError("SpectralCoefficients: index outside the truncation");
    data_[flat(k)] = v;
  }

  /// f(k, value) over every multi-index with |k| <= k_max.
  template <class F>
  void for_each(F&& f) const {
    std::vector<int> k(dim(), 0);
    for (std::size_t i = 0; i < data_.size(); ++i) {
      unflatten(i, k);
      int total = 0;
      for (int v : k) total += v;
      if (total <= k_max_) f(std::span<const int>(k), data_[i]);
    }
  }
  template <class F>
  void transform(F&& f) {
    std::vector<int> k(dim(), 0);
    for (std::size_t i = 0; i < data_.size(); ++i) {
      unflatten(i, k);
      int total = 0;
      for (int v : k) total += v;
      data_[i] = total <= k_max_ ? f(std::span<const int>(k), data_[i]) : 0.0;
    }
  }
  double l2_norm() const {
    double s = 0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  static std::string key(std::span<const int> k) {
    std::string s;
    for (std::size_t j = 0; j < k.size(); ++j) s += (j ? "," : "") + std::to_string(k[j]);
    return s;
  }

 private:
  static std::size_t ipow(int b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= std::size_t(b);
    return r;
  }
  void unflatten(std::size_t i, std::vector<int>& k) const {
    for (std::size_t j = dim(); j-- > 0;) {
      k[j] = int(i % std::size_t(k_max_ + 1));
      i /= std::size_t(k_max_ + 1);
    }
  }

  MultiOrder order_;
  int k_max_;
  std::vector<double> data_;
};

namespace detail {

/// Row-major (k_max+1) x nodes matrix phi_k(x_i), optionally times weights.
inline std::vector<double> basis_matrix(const QuadratureRule& axis, double nu, int k_max, bool weighted) {
  const std::size_t n = axis.size();
  std::vector<double> m((k_max + 1) * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto phi = laguerre_functions_upto(k_max, nu, axis.nodes[i]);
    for (int k = 0; k <= k_max; ++k) m[k * n + i] = phi[k] * (weighted ? axis.weights[i] : 1.0);
  }
  return m;
}

inline std::vector<double> transpose(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
  std::vector<double> t(m.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = m[r * cols + c];
  return t;
}

inline void check_grid_order(const TensorGrid& g, const MultiOrder& order) {
  g.validate();
  if (g.dim() != order.dim()) throw UsageError("grid and order dimensions differ");
}

}  // namespace detail

/// Quadrature projection onto phi_k^nu, |k| <= k_max.
inline SpectralCoefficients analyze(const GridFunction& f, const MultiOrder& order, int k_max) {
  detail::check_grid_order(f.grid, order);
  if (k_max < 0 || k_max > 200) throw UsageError("analyze: k_max must lie in [0, 200]");
  SpectralCoefficients c(order, k_max);
  std::vector<std::size_t> shape = f.grid.shape();
  std::vector<double> data = f.values;
  for (std::size_t j = 0; j < order.dim(); ++j)
    data = contract_axis(data, shape, j, detail::basis_matrix(f.grid.axes[j], order[j], k_max, true), k_max + 1);
  c.raw() = std::move(data);
  c.transform([](std::span<const int>, double v) { return v; });  // zero out |k| > k_max
  return c;
}

/// sum_k c_k phi_k^nu sampled on `grid`.
inline GridFunction synthesize(const SpectralCoefficients& c, const TensorGrid& grid) {
  detail::check_grid_order(grid, c.order());
  std::vector<std::size_t> shape(c.dim(), std::size_t(c.k_max() + 1));
  std::vector<double> data = c.raw();
  for (std::size_t j = 0; j < c.dim(); ++j) {
    const std::size_t n = grid.axes[j].size();
    const auto b = detail::basis_matrix(grid.axes[j], c.order()[j], c.k_max(), false);
    data = contract_axis(data, shape, j, detail::transpose(b, c.k_max() + 1, n), n);
  }
  return GridFunction(grid, std::move(data));
}

enum class SemigroupMethod { spectral, kernel };

/// Per-axis heat-kernel quadrature matrix P[i][l] = p_t(x_i, x_l) w_l.
inline std::vector<double> kernel_matrix(const QuadratureRule& axis, double nu, double t, int jobs = 1) {
  const std::size_t n = axis.size();
  const HeatTimeFactors f(t);
  std::vector<double> m(n * n);
  parallel_for(n, jobs, [&](std::size_t i) {
    for (std::size_t l = 0; l < n; ++l)
      m[i * n + l] = kernel_1d_scaled(nu, f, axis.nodes[i], axis.nodes[l]).value() * axis.weights[l];
  });
  return m;
}

/// e^{-tL} f on the grid of f, either through the truncated eigen-expansion
/// or by quadrature against the closed-form kernel (axis by axis, since the
/// kernel is a tensor product).
inline GridFunction semigroup_apply(const GridFunction& f, const MultiOrder& order, double t,
                                    SemigroupMethod method = SemigroupMethod::spectral, int k_max = -1, int jobs = 1) {
  detail::check_grid_order(f.grid, order);
  if (!(t > 0)) throw DomainError("semigroup_apply: t must be > 0");
  if (method == SemigroupMethod::spectral) {
    SpectralCoefficients c = analyze(f, order, k_max < 0 ? default_k_max(order.dim()) : k_max);
    c.transform([&](std::span<const int> k, double v) {
      int total = 0;
      for (int x : k) total += x;
      return v * std::exp(-t * order.eigenvalue(total));
    });
    return synthesize(c, f.grid);
  }
  std::vector<std::size_t> shape = f.grid.shape();
  std::vector<double> data = f.values;
  for (std::size_t j = 0; j < order.dim(); ++j)
    data = contract_axis(data, shape, j, kernel_matrix(f.grid.axes[j], order[j], t, jobs), shape[j]);
  return GridFunction(f.grid, std::move(data));
}

/// sup over the t-grid of |e^{-t^2 L} f| (the t^2 parameterization), computed
/// spectrally on the grid of f.
inline GridFunction maximal_function(const GridFunction& f, const MultiOrder& order, const std::vector<double>& t_grid,
                                     int k_max = -1) {
  if (t_grid.empty()) throw UsageError("maximal_function: empty t grid");
  detail::check_grid_order(f.grid, order);
  const SpectralCoefficients c = analyze(f, order, k_max < 0 ? default_k_max(order.dim()) : k_max);
  GridFunction out(f.grid);
  for (double tau : t_grid) {
    SpectralCoefficients d = c;
    d.transform([&](std::span<const int> k, double v) {
      int total = 0;
      for (int x : k) total += x;
      return v * std::exp(-tau * tau * order.eigenvalue(total));
    });
    const GridFunction g = synthesize(d, f.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::max(out.values[i], std::fabs(g.values[i]));
  }
  return out;
}

/// Maximal function evaluated at arbitrary points by direct quadrature
/// against the heat kernel, for localized f (atoms) that a truncated
/// expansion cannot resolve. Kernel contributions whose Gaussian factor is
/// below e^{-40} are skipped. Returns one value per point and per time if
/// `per_time` is given (row-major points x times).
inline std::vector<double> maximal_function_at(const GridFunction& f, const MultiOrder& order,
                                               const std::vector<double>& t_grid,
                                               const std::vector<std::vector<double>>& points,
                                               std::vector<double>* per_time = nullptr, int jobs = 1) {
  if (t_grid.empty()) throw UsageError("maximal_function: empty t grid");
  detail::check_grid_order(f.grid, order);
  const std::size_t n = order.dim();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.values[i] != 0.0) support.push_back(i);
  std::vector<std::vector<double>> ynodes(support.size());
  std::vector<double> wf(support.size());
  for (std::size_t s = 0; s < support.size(); ++s) {
    ynodes[s] = f.grid.point(support[s]);
    wf[s] = f.grid.weight(support[s]) * f.values[support[s]];
  }
  std::vector<HeatTimeFactors> factors;
  for (double tau : t_grid) factors.emplace_back(tau * tau);
  std::vector<double> out(points.size(), 0.0);
  if (per_time) per_time->assign(points.size() * t_grid.size(), 0.0);
  parallel_for(points.size(), jobs, [&](std::size_t p) {
    const auto& x = points[p];
    if (x.size() != n) throw UsageError("maximal_function_at: point dimension mismatch");
    for (std::size_t ti = 0; ti < factors.size(); ++ti) {
      const auto& fac = factors[ti];
      double sum = 0;
      for (std::size_t s = 0; s < support.size(); ++s) {
        double gauss = 0;
        for (std::size_t j = 0; j < n; ++j) gauss += 0.5 * fac.coth2t * std::pow(x[j] - ynodes[s][j], 2);
        if (gauss > 40.0) continue;
        double k = 1.0, scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const LogScaled v = kernel_1d_scaled(order[j], fac, x[j], ynodes[s][j]);
          k *= v.mantissa;
          scale += v.log_scale;
        }
        sum += wf[s] * k * std::exp(scale);
      }
      out[p] = std::max(out[p], std::fabs(sum));
      if (per_time) (*per_time)[p * factors.size() + ti] = std::fabs(sum);
    }
  });
  return out;
}

/// Heat-kernel quadrature matrix from the nodes of `source` to the nodes of
/// `target`: m[i][l] = p_t(target_i, source_l) w_l.
inline std::vector<double> transfer_matrix(const QuadratureRule& target, const QuadratureRule& source, double nu,
                                           double t) {
  const HeatTimeFactors f(t);
  std::vector<double> m(target.size() * source.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    for (std::size_t l = 0; l < source.size(); ++l)
      m[i * source.size() + l] = kernel_1d_scaled(nu, f, target.nodes[i], source.nodes[l]).value() * source.weights[l];
  return m;
}

/// sup over the t-grid (t = tau^2) of |e^{-t L} f| at the nodes of another
/// tensor grid, by axis-wise kernel quadrature on f's grid. Suited to
/// localized f whose own grid is fine but small.
inline GridFunction maximal_function_on(const GridFunction& f, const MultiOrder& order,
                                        const std::vector<double>& t_grid, const TensorGrid& target, int jobs = 1) {
  if (t_grid.empty()) throw UsageError("maximal_function: empty t grid");
  detail::check_grid_order(f.grid, order);
  if (target.dim() != order.dim()) throw UsageError("maximal_function_on: target dimension mismatch");
  std::vector<std::vector<double>> per_time(t_grid.size());
  parallel_for(t_grid.size(), jobs, [&](std::size_t ti) {
    const double t = t_grid[ti] * t_grid[ti];
    std::vector<double> data = f.values;
    std::vector<std::size_t> shape = f.grid.shape();
    for (std::size_t j = 0; j < order.dim(); ++j)
      data = contract_axis(data, shape, j, transfer_matrix(target.axes[j], f.grid.axes[j], order[j], t),
                           target.axes[j].size());
    per_time[ti] = std::move(data);
  });
  GridFunction out(target);
  for (const auto& v : per_time)
    for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = std::max(out.values[i], std::fabs(v[i]));
  return out;
}

struct ConeSpec {
  double t_min = 0.05;
  double t_max = 5.0;
  int levels = 48;
};

/// Conical square function
///   S f(x) = ( int_{t_min}^{t_max} int_{|x-y|<t} |t^2 L e^{-t^2 L} f(y)|^2 dy dt / t^{n+1} )^{1/2}
/// with a midpoint rule in log t and the grid quadrature in y.
inline GridFunction square_function(const GridFunction& f, const MultiOrder& order, const ConeSpec& cone,
                                    int k_max = -1) {
  if (!(cone.t_min > 0) || !(cone.t_min < cone.t_max)) throw UsageError("square_function: need 0 < t_min < t_max");
  if (cone.levels < 1) throw UsageError("square_function: need at least one level");
  detail::check_grid_order(f.grid, order);
  const SpectralCoefficients c = analyze(f, order, k_max < 0 ? default_k_max(order.dim()) : k_max);
  const std::size_t N = f.grid.size(), n = order.dim();
  std::vector<std::vector<double>> pts(N);
  for (std::size_t i = 0; i < N; ++i) pts[i] = f.grid.point(i);
  std::vector<double> acc(N, 0.0);
  const double step = std::log(cone.t_max / cone.t_min) / cone.levels;
  for (int lev = 0; lev < cone.levels; ++lev) {
    const double tau = cone.t_min * std::exp((lev + 0.5) * step);
    SpectralCoefficients d = c;
    d.transform([&](std::span<const int> k, double v) {
      int total = 0;
      for (int x : k) total += x;
      const double lam = tau * tau * order.eigenvalue(total);
      return v * lam * std::exp(-lam);
    });
    const GridFunction g = synthesize(d, f.grid);
    std::vector<double> dens(N);
    for (std::size_t i = 0; i < N; ++i) dens[i] = f.grid.weight(i) * g.values[i] * g.values[i];
    const double level_weight = step * std::pow(tau, -double(n));
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0;
      for (std::size_t l = 0; l < N; ++l) {
        double d2 = 0;
        for (std::size_t j = 0; j < n && d2 < tau * tau; ++j) d2 += std::pow(pts[i][j] - pts[l][j], 2);
        if (d2 < tau * tau) s += dens[l];
      }
      acc[i] += level_weight * s;
    }
  }
  for (double& v : acc) v = std::sqrt(v);
  return GridFunction(f.grid, std::move(acc));
}

}  // namespace laguerre
