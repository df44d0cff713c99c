// Closed-form heat kernel next to its truncated eigenfunction expansion, the
// Riesz multipliers for k = e_1, and the critical radius along a line.

#include <cstdio>
#include <vector>

#include "laguerre/laguerre.hpp"

using namespace laguerre;

int main() {
  const MultiOrder order({0.5});
  const double t = 0.5;
  std::printf("heat kernel, nu = 0.5, t = %.2f\n%6s %6s %22s %22s %10s\n", t, "x", "y", "closed form",
              "spectral (k<=60)", "tail");
  for (double x : {0.5, 1.0, 2.0})
    for (double y : {0.25, 1.0, 3.0}) {
      const std::vector<double> xs{x}, ys{y};
      const auto s = kernel_spectral_sum(order, t, xs, ys, 60);
      std::printf("%6.2f %6.2f %22.15e %22.15e %10.2e\n", x, y, kernel_nd(order, t, xs, ys), s.value, s.tail_estimate);
    }

  const std::vector<int> e1{1};
  std::printf("\nRiesz multipliers, k = e_1 (first entries)\n");
  int shown = 0;
  for (const auto& [key, m] : riesz_multiplier_table(order, e1, 6))
    if (shown++ < 6) std::printf("  k=%-4s %.12f\n", key.c_str(), m);

  std::printf("\ncritical radius\n");
  for (double x : {0.05, 0.25, 1.0, 4.0, 16.0}) {
    const std::vector<double> xs{x};
    std::printf("  x=%6.2f  rho=%.6f\n", x, rho(order, xs));
  }
}
