#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "laguerre/errors.hpp"
#include "laguerre/quadrature.hpp"

namespace laguerre {

/// Tensor product of 1-D quadrature rules; flat indices run with the last
/// axis fastest.
struct TensorGrid {
  std::vector<QuadratureRule> axes;

  std::size_t dim() const { return axes.size(); }
  std::size_t size() const {
    std::size_t s = 1;
    for (const auto& a : axes) s *= a.size();
    return s;
  }
  std::vector<std::size_t> shape() const {
    std::vector<std::size_t> s;
    for (const auto& a : axes) s.push_back(a.size());
    return s;
  }
  std::vector<std::size_t> unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(dim());
    for (std::size_t j = dim(); j-- > 0;) {
      idx[j] = flat % axes[j].size();
      flat /= axes[j].size();
    }
    return idx;
  }
  void point(std::size_t flat, std::span<double> out) const {
    for (std::size_t j = dim(); j-- > 0;) {
      out[j] = axes[j].nodes[flat % axes[j].size()];
      flat /= axes[j].size();
    }
  }
  std::vector<double> point(std::size_t flat) const {
    std::vector<double> p(dim());
    point(flat, p);
    return p;
  }
  double weight(std::size_t flat) const {
    double w = 1;
    for (std::size_t j = dim(); j-- > 0;) {
      w *= axes[j].weights[flat % axes[j].size()];
      flat /= axes[j].size();
    }
    return w;
  }
  void validate() const {
    if (axes.empty()) throw UsageError("TensorGrid: need at least one axis");
    for (const auto& a : axes) {
      if (a.nodes.empty() || a.nodes.size() != a.weights.size()) throw UsageError("TensorGrid: malformed axis rule");
      for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a.nodes[i] > 0) || !(a.weights[i] > 0))
          throw DomainError("TensorGrid: nodes and weights must be positive");
    }
  }

  /// [0, x_max]^n with Gauss-Legendre panels of width 1/4 (16 nodes each,
  /// i.e. 64 nodes per unit length) and geometric grading at the origin.
  static TensorGrid half_space(std::size_t n, double x_max, int nodes_per_unit = 64) {
    const int per_panel = 16;
    const double panel = double(per_panel) / nodes_per_unit;
    TensorGrid g;
    g.axes.assign(n, half_line_rule(x_max, panel, per_panel));
    return g;
  }
};

/// Values sampled on the nodes of a TensorGrid.
struct GridFunction {
  TensorGrid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(TensorGrid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
  GridFunction(TensorGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) throw UsageError("GridFunction: value count does not match node count");
  }

  static GridFunction sample(TensorGrid g, const std::function<double(std::span<const double>)>& f) {
    GridFunction out(std::move(g));
    std::vector<double> p(out.grid.dim());
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.grid.point(i, p);
      out.values[i] = f(p);
    }
    return out;
  }

  double inner(const GridFunction& other) const {
    if (other.values.size() != values.size()) throw UsageError("GridFunction::inner: grids differ");
    double s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) s += grid.weight(i) * values[i] * other.values[i];
    return s;
  }
  double l2_norm() const { return std::sqrt(inner(*this)); }
  /// (sum w |f|^p)^{1/p}; a quasi-norm for p < 1.
  double lp_norm(double p) const {
    if (!(p > 0)) throw UsageError("lp_norm: p must be > 0");
    double s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) s += grid.weight(i) * std::pow(std::fabs(values[i]), p);
    return std::pow(s, 1.0 / p);
  }
  double sup_norm() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }
  GridFunction& operator*=(double a) {
    for (double& v : values) v *= a;
    return *this;
  }
};

/// Applies the matrix m (rows x shape[axis], row-major) along one axis of a
/// row-major tensor; the axis length becomes `rows`.
inline std::vector<double> contract_axis(const std::vector<double>& data, std::vector<std::size_t>& shape,
                                         std::size_t axis, const std::vector<double>& m, std::size_t rows) {
  std::size_t pre = 1, post = 1;
  for (std::size_t j = 0; j < axis; ++j) pre *= shape[j];
  for (std::size_t j = axis + 1; j < shape.size(); ++j) post *= shape[j];
  const std::size_t cols = shape[axis];
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> mat(m.data(), Eigen::Index(rows), Eigen::Index(cols));
  std::vector<double> out(pre * rows * post, 0.0);
  for (std::size_t a = 0; a < pre; ++a) {
    Eigen::Map<RowMajor> dst(&out[a * rows * post], Eigen::Index(rows), Eigen::Index(post));
    dst.noalias() = mat * Eigen::Map<const RowMajor>(&data[a * cols * post], Eigen::Index(cols), Eigen::Index(post));
  }
  shape[axis] = rows;
  return out;
}

}  // namespace laguerre
