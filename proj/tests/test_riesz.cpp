#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "laguerre/riesz.hpp"

using namespace laguerre;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using V = std::vector<double>;
using I = std::vector<int>;

// delta_nu^k phi_a^nu(x) for fixed nu, by expanding into terms c x^{-p} phi_b^{nu+i}:
// delta_nu = delta_{nu+i} + i/x on order nu+i, and delta_mu phi_b^mu = -2 sqrt(b) phi_{b-1}^{mu+1}.
double delta_power_eigenfunction(double nu, int k, int a, double x) {
  struct Term {
    double c;
    int p, i;  // x^{-p} phi_{a-i}^{nu+i}
  };
  std::vector<Term> terms{{1.0, 0, 0}};
  for (int step = 0; step < k; ++step) {
    std::vector<Term> next;
    for (const auto& t : terms) {
      const int b = a - t.i;
      if (b >= 1) next.push_back({-2.0 * std::sqrt(double(b)) * t.c, t.p, t.i + 1});
      if (t.i - t.p != 0) next.push_back({double(t.i - t.p) * t.c, t.p + 1, t.i});
    }
    terms = std::move(next);
  }
  double s = 0;
  for (const auto& t : terms) s += t.c * std::pow(x, -t.p) * laguerre_function_1d(a - t.i, nu + t.i, x);
  return s;
}

// sum_a lambda_a^{-k/2} e^{-t lambda_a} (delta^k phi_a)(x) phi_a(y): the Abel-regularized
// spectral kernel, independent of the time integral.
double spectral_kernel_1d(double nu, int k, double t, double x, double y, int a_max = 220) {
  const MultiOrder o({nu});
  const auto py = laguerre_functions_upto(a_max, nu, y);
  double s = 0;
  for (int a = 0; a <= a_max; ++a)
    s += std::pow(o.eigenvalue(a), -0.5 * k) * std::exp(-t * o.eigenvalue(a)) *
         delta_power_eigenfunction(nu, k, a, x) * py[a];
  return s;
}

// multi-indices with entries <= 1 only: there the lowering chain and delta^k coincide
double spectral_kernel_2d(const MultiOrder& o, const I& k, double t, const V& x, const V& y, int a_max = 90) {
  std::vector<std::vector<double>> px(2), py(2);
  for (int j = 0; j < 2; ++j) {
    px[j] = laguerre_functions_upto(a_max, o[j] + k[j], x[j]);
    py[j] = laguerre_functions_upto(a_max, o[j], y[j]);
  }
  double s = 0;
  for (int a0 = k[0]; a0 <= a_max; ++a0)
    for (int a1 = k[1]; a0 + a1 <= a_max; ++a1)
      s += riesz_multiplier(o, k, I{a0, a1}) * std::exp(-t * o.eigenvalue(a0 + a1)) * px[0][a0 - k[0]] *
           px[1][a1 - k[1]] * py[0][a0] * py[1][a1];
  return s;
}

}  // namespace

TEST_CASE("Riesz multipliers", "[riesz][spectral]") {
  const MultiOrder herm({-0.5});
  REQUIRE_THAT(riesz_multiplier(herm, I{1}, I{1}), WithinRel(-2.0 / std::sqrt(5.0), 1e-15));
  REQUIRE(riesz_multiplier(herm, I{1}, I{0}) == 0.0);
  REQUIRE_THROWS_AS(riesz_multiplier(herm, I{0}, I{3}), UsageError);

  for (auto nu : {V{-0.5}, V{0.0}, V{2.3}, V{-0.5, -0.5}, V{0.5, -0.5}, V{1.0, 0.2, -0.5}}) {
    const MultiOrder o(nu);
    const std::size_t n = o.dim();
    // all k with 1 <= |k| <= 3
    std::vector<I> ks;
    I k(n, 0);
    auto rec = [&](auto&& self, std::size_t j, int left) -> void {
      if (j == n) {
        if (total_degree(k) >= 1) ks.push_back(k);
        return;
      }
      for (int v = 0; v <= left; ++v) k[j] = v, self(self, j + 1, left - v);
    };
    rec(rec, 0, 3);
    for (const auto& kk : ks)
      for (auto variant : {RieszVariant::single_power, RieszVariant::composition})
        for (const auto& [key, m] : riesz_multiplier_table(o, kk, 12, variant)) {
          INFO(key);
          REQUIRE(std::fabs(m) <= 1.0);
        }
  }
}

TEST_CASE("single-power and composed Riesz variants", "[riesz][spectral]") {
  const MultiOrder o({0.3, -0.5});
  for (int a0 = 0; a0 < 8; ++a0)
    for (int a1 = 0; a1 < 8; ++a1) {
      const I a{a0, a1};
      REQUIRE_THAT(riesz_multiplier(o, I{1, 0}, a, RieszVariant::composition),
                   WithinAbs(riesz_multiplier(o, I{1, 0}, a), 1e-15));
      const double lam = o.eigenvalue(a0 + a1);
      const double single = riesz_multiplier(o, I{1, 1}, a), composed = riesz_multiplier(o, I{1, 1}, a,
                                                                                          RieszVariant::composition);
      if (single != 0) REQUIRE_THAT(composed / single, WithinRel(lam / std::sqrt(lam * (lam - 2)), 1e-14));
    }
}

TEST_CASE("spectral Riesz transform is an L2 contraction", "[riesz][spectral]") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (auto nu : {V{-0.5}, V{1.5}, V{0.0, -0.5}}) {
    const MultiOrder o(nu);
    for (int trial = 0; trial < 50; ++trial) {
      SpectralCoefficients c(o, o.dim() == 1 ? 60 : 30);
      c.transform([&](std::span<const int>, double) { return nd(rng); });
      for (const I& k : {I(o.dim(), 1), [&] { I e(o.dim(), 0); e[0] = 2; return e; }()}) {
        REQUIRE(riesz_spectral(c, k).l2_norm() <= c.l2_norm() * (1 + 1e-10));
        REQUIRE(riesz_spectral(c, k, RieszVariant::composition).l2_norm() <= c.l2_norm() * (1 + 1e-10));
      }
    }
  }
}

TEST_CASE("spectral Riesz on a grid: phi_1 maps to a multiple of phi_0 of the shifted order", "[riesz][spectral]") {
  const TensorGrid g = TensorGrid::half_space(1, 14.0);
  const MultiOrder o({-0.5});
  const auto phi1 = GridFunction::sample(g, [&](std::span<const double> x) { return laguerre_function_1d(1, -0.5, x[0]); });
  const GridFunction r = riesz_spectral(phi1, o, I{1}, RieszVariant::single_power, 30);
  for (std::size_t i = 0; i < g.size(); i += 41)
    REQUIRE_THAT(r.values[i], WithinAbs(-2 / std::sqrt(5.0) * laguerre_function_1d(0, 0.5, g.axes[0].nodes[i]), 1e-9));
}

TEST_CASE("regularized Riesz kernel matches the Abel-summed spectral kernel", "[riesz][kernel]") {
  for (double nu : {-0.5, 0.0, 1.3}) {
    const MultiOrder o({nu});
    for (int k : {1, 2, 3}) {
      const RieszKernel K(o, I{k});
      for (auto [x, y] : {std::pair{1.0, 1.7}, std::pair{0.4, 0.45}, std::pair{2.0, 0.6}, std::pair{1.2, 1.2}}) {
        const double t = 0.05;
        INFO("nu=" << nu << " k=" << k << " x=" << x << " y=" << y);
        REQUIRE_THAT(K.evaluate(t, V{x}, V{y}), WithinAbs(spectral_kernel_1d(nu, k, t, x, y), 1e-9));
      }
    }
  }
  const MultiOrder o2({-0.5, 0.7});
  for (const I& k : {I{1, 0}, I{0, 1}, I{1, 1}}) {
    const RieszKernel K(o2, k);
    const V x{0.8, 1.1}, y{1.3, 0.6};
    REQUIRE_THAT(K.evaluate(0.1, x, y), WithinAbs(spectral_kernel_2d(o2, k, 0.1, x, y), 1e-9));
  }
}

TEST_CASE("Riesz kernel: singularity, continuity in t, large-t decay", "[riesz][kernel]") {
  const MultiOrder o({0.5});
  REQUIRE_THROWS_AS(riesz_kernel(o, I{1}, V{1.0}, V{1.0}), SingularityError);
  REQUIRE_THROWS_AS(riesz_kernel(o, I{1}, V{-1.0}, V{1.0}), DomainError);
  REQUIRE(std::isfinite(riesz_heat_composite_kernel(o, I{1}, 0.1, V{1.0}, V{1.0})));

  for (auto [x, y] : {std::pair{1.0, 1.3}, std::pair{0.3, 0.9}}) {
    const double k0 = riesz_kernel(o, I{1}, V{x}, V{y});
    REQUIRE_THAT(riesz_heat_composite_kernel(o, I{1}, 1e-10, V{x}, V{y}), WithinRel(k0, 1e-6));
    // beyond t > |x-y|^2 the regularized kernel shrinks monotonically
    double prev = std::numeric_limits<double>::infinity();
    for (double t : log_spaced(std::pow(x - y, 2) * 4, 20.0, 12)) {
      const double v = std::fabs(riesz_heat_composite_kernel(o, I{1}, t, V{x}, V{y}));
      REQUIRE(v < prev);
      prev = v;
    }
    REQUIRE(prev < 1e-10);
  }
}

TEST_CASE("Riesz kernel reproduces the spectral transform as a principal value", "[riesz][kernel]") {
  // T f(x) = PV int K(x,y) f(y) dy, symmetrized around y = x so that the 1/|x-y|
  // parts cancel pairwise.
  for (double nu : {-0.5, 0.5}) {
    const MultiOrder o({nu});
    const RieszKernel K(o, I{1});
    auto f = [&](double y) { return laguerre_function_1d(1, nu, y); };
    const double want_coef = riesz_multiplier(o, I{1}, I{1});
    double err2 = 0, norm2 = 0;
    const QuadratureRule outer = interval_rule(0.05, 5.0, 10, 6);
    for (std::size_t i = 0; i < outer.size(); ++i) {
      const double x = outer.nodes[i];
      auto pair = [&](double h) {
        double s = K(V{x}, V{x + h}) * f(x + h);
        if (x - h > 0) s += K(V{x}, V{x - h}) * f(x - h);
        return s;
      };
      double v = 0;
      // geometric cuts towards h = 0, where the pair sum is bounded but each
      // half is not; a fixed rule keeps the nodes away from h = 0
      std::vector<double> cuts{0.0, 1e-4, 1e-3, 1e-2, 0.1, x, x + 1, 9.0};
      std::sort(cuts.begin(), cuts.end());
      v += composite_rule(cuts, gauss_legendre(12)).integrate(pair);
      const double want = want_coef * laguerre_function_1d(0, nu + 1, x);
      err2 += outer.weights[i] * (v - want) * (v - want);
      norm2 += outer.weights[i] * want * want;
    }
    INFO("nu=" << nu);
    REQUIRE(std::sqrt(err2 / norm2) < 1e-3);
  }
}

TEST_CASE("Riesz size and gradient bounds fit with finite constants", "[riesz][fit]") {
  for (auto nu : {V{0.5}, V{-0.5}}) {
    const MultiOrder o(nu);
    auto samples = random_samples(1, 0.02, 4.0, 1e-3, 10.0, 600, 5);
    for (const auto& fam : riesz_bound_families(o, I{1})) {
      const auto rep = fit_gaussian_bound(fam, samples);
      INFO(fam.id);
      REQUIRE(rep.passed());
      REQUIRE(rep.fitted_C < 1e3);
      REQUIRE(std::isnan(rep.fixed_c));
    }
  }
}

TEST_CASE("Hoelder regularity of the Riesz kernel", "[riesz][cz]") {
  for (double nu : {0.0, 1.0}) {
    const MultiOrder o({nu});
    SmoothnessSpec spec;
    spec.samples = random_samples(1, 0.1, 3.0, 1, 1, 40, 3);
    const auto rep = verify_cz_smoothness(o, I{1}, spec);
    INFO("nu=" << nu << " exponent=" << rep.extras.at("empirical_exponent"));
    REQUIRE(rep.passed());
    REQUIRE(rep.extras.at("empirical_exponent") >= o.smoothness_exponent() - 0.05);
  }
  REQUIRE_THROWS_AS(verify_cz_smoothness(MultiOrder({0.0}), I{1}, SmoothnessSpec{}), UsageError);
}
