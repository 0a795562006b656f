#include "metrogap/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "metrogap/error.hpp"

namespace metrogap {

GaussRule gauss_legendre(int q) {
  if (q < 1) throw InvalidArgument("quadrature order must be positive");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(q));
  rule.weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = 2.0 * v0 * v0;
  }
  return rule;
}

}  // namespace metrogap
