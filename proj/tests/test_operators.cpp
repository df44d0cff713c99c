#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "laguerre/bound_fit.hpp"
#include "laguerre/operators.hpp"

using namespace laguerre;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GridFunction eigenfunction(const TensorGrid& g, const MultiOrder& order, std::vector<int> k) {
  return GridFunction::sample(g, [&](std::span<const double> x) { return laguerre_function(k, order, x); });
}

GridFunction bump(const TensorGrid& g, double centre, double width) {
  return GridFunction::sample(g, [&](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += (v - centre) * (v - centre);
    return std::exp(-s / (width * width));
  });
}

double l2_diff(const GridFunction& a, const GridFunction& b) {
  GridFunction d = a;
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  return d.l2_norm();
}

}  // namespace

TEST_CASE("analysis of eigenfunctions gives unit vectors", "[spectral]") {
  const TensorGrid g = TensorGrid::half_space(1, 20.0);
  for (double nu : {-0.5, 0.0, 1.3}) {
    const MultiOrder order({nu});
    const auto c = analyze(eigenfunction(g, order, {3}), order, 60);
    c.for_each([&](std::span<const int> k, double v) { REQUIRE_THAT(v, WithinAbs(k[0] == 3 ? 1.0 : 0.0, 1e-8)); });

    GridFunction f = eigenfunction(g, order, {0});
    const GridFunction f1 = eigenfunction(g, order, {1});
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += 2 * f1.values[i];
    const auto d = analyze(f, order, 10);
    REQUIRE_THAT(d.at(std::vector<int>{0}), WithinAbs(1.0, 1e-8));
    REQUIRE_THAT(d.at(std::vector<int>{1}), WithinAbs(2.0, 1e-8));
    REQUIRE_THAT(d.at(std::vector<int>{2}), WithinAbs(0.0, 1e-8));
  }
}

TEST_CASE("synthesis inverts analysis and preserves norms", "[spectral]") {
  const TensorGrid g = TensorGrid::half_space(1, 20.0);
  const MultiOrder order({0.5});
  const GridFunction f = bump(g, 3.0, 0.8);
  const GridFunction back = synthesize(analyze(f, order, 60), g);
  REQUIRE(l2_diff(back, f) / f.l2_norm() < 1e-6);

  SpectralCoefficients c(order, 30);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  c.transform([&](std::span<const int>, double) { return nd(rng); });
  REQUIRE_THAT(synthesize(c, g).l2_norm(), WithinRel(c.l2_norm(), 1e-8));

  const SpectralCoefficients zero(order, 5);
  REQUIRE(synthesize(zero, g).sup_norm() == 0.0);

  SpectralCoefficients unit(order, 5);
  unit.set(std::vector<int>{4}, 1.0);
  REQUIRE(l2_diff(synthesize(unit, g), eigenfunction(g, order, {4})) < 1e-14);
  REQUIRE(SpectralCoefficients::key(std::vector<int>{2, 0, 11}) == "2,0,11");
  REQUIRE_THROWS_AS(analyze(f, order, 201), UsageError);
}

TEST_CASE("two-dimensional analysis respects the total-degree truncation", "[spectral]") {
  const TensorGrid g = TensorGrid::half_space(2, 12.0, 32);
  const MultiOrder order({-0.5, 0.7});
  const auto c = analyze(eigenfunction(g, order, {2, 5}), order, 12);
  c.for_each([&](std::span<const int> k, double v) {
    REQUIRE_THAT(v, WithinAbs(k[0] == 2 && k[1] == 5 ? 1.0 : 0.0, 1e-8));
  });
  REQUIRE(c.at(std::vector<int>{7, 6}) == 0.0);
  REQUIRE(c.at(std::vector<int>{1}) == 0.0);  // wrong dimension reads as outside the truncation
}

TEST_CASE("semigroup acts diagonally on eigenfunctions", "[semigroup]") {
  const TensorGrid g = TensorGrid::half_space(1, 14.0);
  for (double nu : {-0.5, 0.0, 1.3}) {
    const MultiOrder order({nu});
    for (int k : {0, 3, 10}) {
      const GridFunction phi = eigenfunction(g, order, {k});
      for (double t : {0.1, 1.0}) {
        GridFunction want = phi;
        want *= std::exp(-t * order.eigenvalue(k));
        for (auto method : {SemigroupMethod::spectral, SemigroupMethod::kernel}) {
          const GridFunction got = semigroup_apply(phi, order, t, method);
          INFO("nu=" << nu << " k=" << k << " t=" << t);
          REQUIRE(l2_diff(got, want) / phi.l2_norm() < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("spectral and kernel semigroups agree; semigroup is self-adjoint", "[semigroup]") {
  const TensorGrid g = TensorGrid::half_space(1, 14.0);
  const MultiOrder order({0.3});
  const GridFunction f = bump(g, 2.5, 0.7);
  const GridFunction h = bump(g, 4.0, 1.2);
  const GridFunction a = semigroup_apply(f, order, 0.5, SemigroupMethod::spectral);
  const GridFunction b = semigroup_apply(f, order, 0.5, SemigroupMethod::kernel);
  double sup = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sup = std::max(sup, std::fabs(a.values[i] - b.values[i]));
  REQUIRE(sup < 1e-6);

  for (auto method : {SemigroupMethod::spectral, SemigroupMethod::kernel}) {
    const double lhs = semigroup_apply(f, order, 0.3, method).inner(h);
    const double rhs = f.inner(semigroup_apply(h, order, 0.3, method));
    REQUIRE(std::fabs(lhs - rhs) < 1e-8);
  }
  // composition in both forms
  const GridFunction two = semigroup_apply(semigroup_apply(f, order, 0.2), order, 0.3);
  REQUIRE(l2_diff(two, semigroup_apply(f, order, 0.5)) / f.l2_norm() < 1e-12);
  const auto K = SemigroupMethod::kernel;
  const GridFunction twok = semigroup_apply(semigroup_apply(f, order, 0.2, K), order, 0.3, K);
  REQUIRE(l2_diff(twok, semigroup_apply(f, order, 0.5, K)) / f.l2_norm() < 1e-6);

  // strong continuity
  const GridFunction near0 = semigroup_apply(f, order, 1e-4);
  REQUIRE(l2_diff(near0, f) / f.l2_norm() < 0.01);
  REQUIRE_THROWS_AS(semigroup_apply(f, order, 0.0), DomainError);
}

TEST_CASE("two-dimensional kernel semigroup matches the spectral one", "[semigroup]") {
  const TensorGrid g = TensorGrid::half_space(2, 9.0, 32);
  const MultiOrder order({-0.5, 1.0});
  const GridFunction f = bump(g, 2.0, 0.6);
  const GridFunction a = semigroup_apply(f, order, 0.5, SemigroupMethod::spectral, 40);
  const GridFunction b = semigroup_apply(f, order, 0.5, SemigroupMethod::kernel, -1, 2);
  REQUIRE(l2_diff(a, b) / f.l2_norm() < 1e-6);
}

TEST_CASE("maximal function", "[maximal]") {
  const TensorGrid g = TensorGrid::half_space(1, 12.0);
  const MultiOrder order({0.0});
  const auto times = log_spaced(1e-3, 10, 64);
  const GridFunction phi0 = eigenfunction(g, order, {0});
  const GridFunction m = maximal_function(phi0, order, times);
  // sup attained at the smallest time: e^{-tau^2 * 2} with tau = 1e-3
  for (std::size_t i = 0; i < m.values.size(); ++i)
    REQUIRE_THAT(m.values[i], WithinAbs(phi0.values[i] * std::exp(-2e-6), 1e-12));

  GridFunction f = bump(g, 3.0, 0.5);
  GridFunction neg = f;
  neg *= -1;
  const GridFunction mf = maximal_function(f, order, times);
  const GridFunction mn = maximal_function(neg, order, times);
  REQUIRE(l2_diff(mf, mn) == 0.0);
  const double p1 = maximal_function(f, order, log_spaced(1e-3, 10, 128)).lp_norm(0.9);
  REQUIRE_THAT(p1, WithinRel(mf.lp_norm(0.9), 0.01));

  // direct-kernel evaluation agrees with the spectral route away from t ~ 0
  const auto coarse = log_spaced(0.2, 3, 16);
  const GridFunction spec = maximal_function(f, order, coarse);
  std::vector<std::vector<double>> pts;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g.size(); i += 37) pts.push_back(g.point(i)), idx.push_back(i);
  const auto direct = maximal_function_at(f, order, coarse, pts);
  for (std::size_t p = 0; p < pts.size(); ++p) REQUIRE(std::fabs(direct[p] - spec.values[idx[p]]) < 1e-8);
  REQUIRE_THROWS_AS(maximal_function(f, order, {}), UsageError);
}

TEST_CASE("square function", "[square]") {
  const TensorGrid g = TensorGrid::half_space(1, 10.0, 32);
  const MultiOrder order({0.5});
  const ConeSpec cone{0.02, 6.0, 48};
  REQUIRE(square_function(GridFunction(g), order, cone).sup_norm() == 0.0);

  const GridFunction f = bump(g, 2.5, 0.5);
  GridFunction f2 = f;
  f2 *= 2;
  const GridFunction s1 = square_function(f, order, cone);
  const GridFunction s2 = square_function(f2, order, cone);
  for (std::size_t i = 0; i < s1.values.size(); ++i) REQUIRE_THAT(s2.values[i], WithinAbs(2 * s1.values[i], 1e-12));

  // ||S f||_2 / ||f||_2 is the same constant for different f
  std::vector<double> ratios;
  for (auto [c, w] : {std::pair{2.5, 0.5}, std::pair{4.0, 0.8}, std::pair{1.5, 0.3}}) {
    const GridFunction h = bump(g, c, w);
    ratios.push_back(square_function(h, order, cone).l2_norm() / h.l2_norm());
  }
  for (double r : ratios) REQUIRE_THAT(r, WithinRel(ratios[0], 0.1));
  REQUIRE_THROWS_AS(square_function(f, order, ConeSpec{1.0, 1.0, 4}), UsageError);
}
