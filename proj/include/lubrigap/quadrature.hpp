#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace lubrigap {

/// Gauss-Legendre rule with N points on [-1, 1]; exact for polynomials of
/// degree 2N - 1.
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }

  /// Integral of f over [a, b].
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), m = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += weights[i] * f(c + m * nodes[i]);
    return s * m;
  }
};

}  // namespace lubrigap
