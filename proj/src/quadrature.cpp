#include "noonsim/quadrature.hpp"

#include <cmath>
#include <string>

#include "noonsim/errors.hpp"

namespace noonsim {

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw ValidationError("Gauss-Hermite rule needs at least one node");
  constexpr double kPiToMinusQuarter = 0.7511255444649425;
  constexpr int kMaxIterations = 100;

  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    // Asymptotic starting guesses for the largest roots, then extrapolation.
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    int it = 0;
    for (; it < kMaxIterations; ++it) {
      double p1 = kPiToMinusQuarter, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    if (it == kMaxIterations)
      throw NumericalError("Gauss-Hermite root " + std::to_string(i) + " of " +
                           std::to_string(n) + " did not converge");
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  // Ascending order.
  std::vector<double> x(rule.nodes.rbegin(), rule.nodes.rend());
  std::vector<double> w(rule.weights.rbegin(), rule.weights.rend());
  rule.nodes = std::move(x);
  rule.weights = std::move(w);
  rule.unweighted.resize(n);
  for (int i = 0; i < n; ++i)
    rule.unweighted[i] = std::exp(std::log(rule.weights[i]) + rule.nodes[i] * rule.nodes[i]);
  return rule;
}

}  // namespace noonsim
