#include "dpk/quadrature.hpp"

#include "dpk/error.hpp"

#include <numbers>

namespace dpk::quad {

Rule gauss_legendre(int n, double a, double b) {
  if (n <= 0) throw ArgumentError("gauss_legendre: node count must be positive");
  Rule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = center - half * z;
    rule.nodes[n - 1 - i] = center + half * z;
    rule.weights[i] = rule.weights[n - 1 - i] = w * half;
  }
  return rule;
}

}  // namespace dpk::quad
