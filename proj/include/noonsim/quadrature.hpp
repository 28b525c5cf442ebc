#pragma once

#include <vector>

namespace noonsim {

// Gauss-Hermite rule for weight exp(-x^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  // weights[i] * exp(nodes[i]^2): use these to integrate functions that are
  // not written with an explicit exp(-x^2) factor.
  std::vector<double> unweighted;
};

// Newton iteration on the orthonormal Hermite recurrence. Throws
// NumericalError when a root fails to converge.
GaussHermiteRule gauss_hermite(int n);

}  // namespace noonsim
