#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "laguerre/quadrature.hpp"
#include "laguerre/special_functions.hpp"

using namespace laguerre;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

double oracle_scaled_bessel(double alpha, double z) {
  const big a(alpha), x(z);
  return static_cast<double>(boost::math::cyl_bessel_i(a, x) * exp(-x));
}

// Exact L_k^alpha(x) for rational alpha and x.
boost::multiprecision::cpp_rational exact_laguerre(int k, const boost::multiprecision::cpp_rational& alpha,
                                                   const boost::multiprecision::cpp_rational& x) {
  using R = boost::multiprecision::cpp_rational;
  R prev = 1, cur = 1 + alpha - x;
  if (k == 0) return prev;
  for (int j = 1; j < k; ++j) {
    R next = ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

TEST_CASE("scaled Bessel matches a 50-digit oracle", "[bessel]") {
  for (double a : {-0.5, -0.3, 0.0, 0.5, 1.0, 1.7, 5.0, 20.0, 60.0}) {
    for (double z : {1e-8, 0.1, 1.0, 5.0, 20.0, 29.9, 30.1, 50.0, 120.0, 1e3, 1e4}) {
      const double got = scaled_bessel_i(a, z);
      const double want = oracle_scaled_bessel(a, z);
      INFO("alpha=" << a << " z=" << z);
      REQUIRE_THAT(got, WithinRel(want, 5e-13));
    }
  }
}

TEST_CASE("half-integer orders reduce to hyperbolic functions", "[bessel]") {
  for (double z : {0.01, 0.3, 1.0, 7.0, 25.0, 31.0, 80.0}) {
    const double c = std::sqrt(2.0 / (std::numbers::pi * z));
    REQUIRE_THAT(scaled_bessel_i(0.5, z), WithinRel(c * 0.5 * -std::expm1(-2 * z), 1e-13));
    REQUIRE_THAT(scaled_bessel_i(-0.5, z), WithinRel(c * 0.5 * (1 + std::exp(-2 * z)), 1e-13));
  }
  REQUIRE_THAT(bessel_i_scaled(0.5, 1.0).scaled_value,
               WithinRel(std::exp(-1.0) * std::sqrt(2 / std::numbers::pi) * std::sinh(1.0), 1e-14));
  REQUIRE(bessel_i_scaled(0.0, 0.0).scaled_value == 1.0);
  // Leading Hankel term e^{-z} I ~ (2 pi z)^{-1/2}; at order 2 the first
  // correction -(4a^2-1)/(8z) = -1.875e-4 is still visible at z = 1e4.
  const double lead = 1.0 / std::sqrt(2 * std::numbers::pi * 1e4);
  REQUIRE_THAT(scaled_bessel_i(2.0, 1e4) / lead - 1.0, WithinAbs(-15.0 / 8e4, 1e-8));
}

TEST_CASE("scaled Bessel stays within [0, 1] for non-negative order", "[bessel]") {
  for (double a : {0.0, 0.4, 3.0})
    for (double z = 0; z < 200; z += 0.37) {
      const double v = scaled_bessel_i(a, z);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
}

TEST_CASE("Bessel domain errors", "[bessel]") {
  REQUIRE_THROWS_AS(scaled_bessel_i(0.0, -1.0), DomainError);
  REQUIRE_THROWS_AS(scaled_bessel_i(-1.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(scaled_bessel_i(-2.5, 1.0), DomainError);
}

TEST_CASE("Bessel recurrence and asymptotic identities", "[bessel]") {
  const std::vector<double> zs{0.1, 0.5, 1, 2, 5, 10, 20, 35, 50};
  for (double a : {-0.5, 0.0, 1.7}) {
    for (double z : zs) {
      // I_a - I_{a+2} = 2(a+1)/z I_{a+1}; the scaling e^{-z} is common.
      const double lhs = scaled_bessel_i(a, z) - scaled_bessel_i(a + 2, z);
      const double rhs = 2 * (a + 1) / z * scaled_bessel_i(a + 1, z);
      REQUIRE(lhs > 0);
      REQUIRE_THAT(lhs, WithinRel(rhs, 1e-12));
      REQUIRE(std::fabs(scaled_bessel_i(a, z) - scaled_bessel_i(a + 1, z)) <
              (4 * a + 6) * scaled_bessel_i(a + 1, z) / z);
    }
  }
  // d/dz (z^{-a} I_a) = z^{-a} I_{a+1}
  for (double a : {-0.5, 0.0, 1.7}) {
    for (double z : {0.5, 1.0, 5.0, 20.0}) {
      auto g = [&](double s) { return std::pow(s, -a) * scaled_bessel_i(a, s) * std::exp(s - z); };
      const double h = 1e-4 * z;
      const double fd = (-g(z + 2 * h) + 8 * g(z + h) - 8 * g(z - h) + g(z - 2 * h)) / (12 * h);
      REQUIRE_THAT(fd, WithinRel(std::pow(z, -a) * scaled_bessel_i(a + 1, z), 1e-6));
    }
  }
  for (double a : {-0.5, 0.0, 1.7}) {
    const double z = 1e-6;
    const double ratio = scaled_bessel_i(a, z) * std::exp(z) / std::pow(z, a);
    REQUIRE_THAT(ratio, WithinRel(1.0 / (std::pow(2.0, a) * std::tgamma(a + 1)), 1e-4));
  }
}

TEST_CASE("log-gamma", "[gamma]") {
  REQUIRE_THAT(log_gamma(0.5), WithinRel(0.5 * std::log(std::numbers::pi), 1e-14));
  for (double x : {0.1, 1.0, 3.3, 17.5, 201.0})
    REQUIRE_THAT(log_gamma(x), WithinRel(boost::math::lgamma(x), 1e-13));
  REQUIRE_THROWS_AS(log_gamma(0.0), DomainError);
}

TEST_CASE("Laguerre polynomials against exact rational recurrence", "[laguerre]") {
  using R = boost::multiprecision::cpp_rational;
  REQUIRE(laguerre_polynomial(0, 0.7, 5.0) == 1.0);
  REQUIRE_THAT(laguerre_polynomial(1, 0.5, 2.0), WithinAbs(-0.5, 1e-15));
  const double v = laguerre_polynomial(5, -0.5, 3.0);
  REQUIRE_THAT(v, WithinRel(static_cast<double>(exact_laguerre(5, R(-1, 2), R(3))), 1e-12));

  // Normalized values stay O(1); compare them for larger degrees.
  for (int k : {10, 40, 100, 200}) {
    for (auto [num, den] : {std::pair{3, 1}, std::pair{37, 4}, std::pair{1, 10}}) {
      const double x = double(num) / den;
      const double exact = static_cast<double>(exact_laguerre(k, R(3, 10), R(num, den)));
      const double got = laguerre_polynomial(k, 0.3, x);
      const double norm = std::exp(0.5 * (std::lgamma(k + 1.0) - std::lgamma(k + 1.3)) - 0.5 * x);
      INFO("k=" << k << " x=" << x);
      REQUIRE_THAT(got * norm, WithinAbs(exact * norm, 1e-11));
    }
  }
}

TEST_CASE("Laguerre functions: closed values and two evaluation routes agree", "[laguerre]") {
  REQUIRE_THAT(laguerre_function_1d(0, -0.5, 0.7),
               WithinRel(std::sqrt(2 / std::sqrt(std::numbers::pi)) * std::exp(-0.245), 1e-14));
  REQUIRE_THAT(laguerre_function_1d(0, 0.0, 1.0), WithinRel(std::sqrt(2.0) * std::exp(-0.5), 1e-14));
  REQUIRE_THROWS_AS(laguerre_function_1d(0, 0.0, 0.0), DomainError);

  for (double nu : {-0.5, 0.0, 1.3, 7.0}) {
    for (double x : {0.05, 0.8, 2.5, 6.0, 12.0}) {
      const auto all = laguerre_functions_upto(120, nu, x);
      for (int k = 0; k <= 120; k += 7) REQUIRE_THAT(all[k], WithinAbs(laguerre_function_1d(k, nu, x), 1e-11));
    }
  }
  const MultiOrder order({-0.5, 0.5});
  const std::vector<int> k{1, 2};
  const std::vector<double> x{0.4, 1.1};
  REQUIRE_THAT(laguerre_function(k, order, x),
               WithinRel(laguerre_function_1d(1, -0.5, 0.4) * laguerre_function_1d(2, 0.5, 1.1), 1e-15));
}

TEST_CASE("Laguerre functions are orthonormal under quadrature", "[laguerre]") {
  const QuadratureRule rule = half_line_rule(14.0, 0.25, 16);
  for (double nu : {-0.5, 0.0, 1.3}) {
    std::vector<std::vector<double>> phi(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) phi[i] = laguerre_functions_upto(20, nu, rule.nodes[i]);
    for (int j = 0; j <= 20; ++j)
      for (int k = 0; k <= j; ++k) {
        double s = 0;
        for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * phi[i][j] * phi[i][k];
        REQUIRE_THAT(s, WithinAbs(j == k ? 1.0 : 0.0, 1e-8));
      }
  }
}

TEST_CASE("MultiOrder derived quantities", "[order]") {
  const MultiOrder o({-0.5, 1.0, 0.3});
  REQUIRE(o.active_axes() == std::vector<std::size_t>{1, 2});
  REQUIRE(o.nu_min() == 0.3);
  REQUIRE_THAT(o.smoothness_exponent(), WithinAbs(0.8, 1e-15));
  REQUIRE_THAT(o.eigenvalue(2), WithinAbs(8 + 2 * 0.8 + 6, 1e-14));
  const MultiOrder hermite = MultiOrder::uniform(2, -0.5);
  REQUIRE(std::isinf(hermite.nu_min()));
  REQUIRE(hermite.smoothness_exponent() == 1.0);
  REQUIRE_THROWS_AS(MultiOrder({0.0, -0.6}), DomainError);
  REQUIRE_THROWS_AS(MultiOrder(std::vector<double>{}), UsageError);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly", "[quadrature]") {
  for (int n : {1, 2, 5, 16, 33}) {
    const auto r = gauss_legendre(n);
    for (int d = 0; d < 2 * n; ++d) {
      const double s = r.integrate([&](double x) { return std::pow(x, d); });
      REQUIRE_THAT(s, WithinAbs(d % 2 ? 0.0 : 2.0 / (d + 1), 1e-13));
    }
  }
  const auto h = half_line_rule(3.0, 0.25, 16);
  REQUIRE_THAT(h.integrate([](double x) { return std::sqrt(x); }), WithinRel(2.0 * std::pow(3.0, 1.5) / 3.0, 1e-9));
  const AdaptiveIntegrator adapt;
  REQUIRE_THAT(adapt.integrate([](double x) { return std::exp(-x * x); }, -8, 8, 1e-13),
               WithinRel(std::sqrt(std::numbers::pi), 1e-12));
}
