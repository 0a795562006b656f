#pragma once

#include <vector>

namespace metrogap {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// q-point rule (q >= 1) by the Golub-Welsch eigenvalue method.
GaussRule gauss_legendre(int q);

}  // namespace metrogap
