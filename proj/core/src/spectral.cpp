#include "metrogap/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "metrogap/error.hpp"
#include "numeric.hpp"

namespace metrogap {

std::string to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::Dense:
      return "dense";
    case SolverMode::Iterative:
      return "iterative";
    case SolverMode::Auto:
      return "auto";
  }
  return "auto";
}

SolverMode solver_mode_from_string(const std::string& text) {
  if (text == "dense") return SolverMode::Dense;
  if (text == "iterative") return SolverMode::Iterative;
  if (text == "auto") return SolverMode::Auto;
  throw InvalidArgument("solver mode must be dense, iterative or auto");
}

Eigen::SparseMatrix<double> symmetric_operator(const GridChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(chain.size() + 2 * chain.edges().size());
  for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, chain.holding()[static_cast<std::size_t>(i)]);
  for (const auto& e : chain.edges()) {
    const auto a = static_cast<Eigen::Index>(e.lower);
    const auto b = static_cast<Eigen::Index>(e.upper);
    t.emplace_back(a, b, e.symmetric_weight);
    t.emplace_back(b, a, e.symmetric_weight);
  }
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

Eigen::MatrixXd dense_symmetric_operator(const GridChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) S(i, i) = chain.holding()[static_cast<std::size_t>(i)];
  for (const auto& e : chain.edges()) {
    S(static_cast<Eigen::Index>(e.lower), static_cast<Eigen::Index>(e.upper)) = e.symmetric_weight;
    S(static_cast<Eigen::Index>(e.upper), static_cast<Eigen::Index>(e.lower)) = e.symmetric_weight;
  }
  return S;
}

Eigen::MatrixXd dense_transition_matrix(const GridChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t x = 0; x < chain.size(); ++x) {
    K(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = chain.holding()[x];
    for (const auto& inc : chain.incident(x)) {
      K(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(inc.neighbor)) = chain.transition(x, inc.neighbor);
    }
  }
  return K;
}

bool is_connected(const GridChain& chain) {
  std::vector<char> seen(chain.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (const auto& inc : chain.incident(x)) {
      if (!seen[inc.neighbor] && chain.edges()[inc.edge].conductance > 0.0) {
        seen[inc.neighbor] = 1;
        ++count;
        stack.push_back(inc.neighbor);
      }
    }
  }
  return count == chain.size();
}

QuadraticForms quadratic_forms(const GridChain& chain, const StateFunction& f) {
  return {dirichlet_form(chain, f, f), variance(chain, f), expectation(chain, f)};
}

double rayleigh_quotient(const GridChain& chain, const StateFunction& f) {
  const QuadraticForms q = quadratic_forms(chain, f);
  if (!(q.variance > 1e-14 * (q.variance + q.mean * q.mean))) {
    throw InvalidArgument("Rayleigh quotient of a function with zero variance");
  }
  return q.energy / q.variance;
}

double rayleigh_upper_bound(const GridChain& chain, const TestFunction& f) {
  const QuadraticForms q = quadratic_forms(chain, f.f);
  if (!(q.variance > 0.0)) throw InvalidArgument("test function '" + f.label + "' has zero variance");
  const double second = q.variance + q.mean * q.mean;
  if (std::abs(q.mean) > 1e-8 * std::sqrt(second)) {
    throw InvalidArgument("test function '" + f.label + "' is not centred");
  }
  return q.energy / q.variance;
}

namespace {

using Vec = Eigen::VectorXd;

struct Eigenpair {
  double lambda = 0.0;
  Vec v;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Vec sqrt_pi(const GridChain& chain) {
  Vec q(static_cast<Eigen::Index>(chain.size()));
  const auto lpi = chain.target().log_probabilities();
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = std::exp(0.5 * lpi[static_cast<std::size_t>(i)]);
  return q / q.norm();
}

// alternating signs with a small deterministic perturbation, orthogonal to q
Vec start_vector(Eigen::Index n, const Vec& q) {
  Vec s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = static_cast<double>(splitmix64(static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53 - 0.5;
    s(i) = (i % 2 == 0 ? 1.0 : -1.0) + 0.25 * h;
  }
  s -= q.dot(s) * q;
  return s / s.norm();
}

// lambda from an approximate eigenvector v of S by the edge-sum Rayleigh quotient
double polish(const GridChain& chain, const Vec& v) {
  const auto lpi = chain.target().log_probabilities();
  std::vector<double> phi(chain.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = v(static_cast<Eigen::Index>(i)) * std::exp(-0.5 * lpi[i]);
  return rayleigh_quotient(chain, StateFunction(std::move(phi)));
}

// extreme Ritz pair of a symmetric operator from a Lanczos run with full
// reorthogonalisation, optionally kept orthogonal to a deflation vector
template <class Op>
Eigenpair lanczos(const Op& apply, const Vec& start, const Vec* deflate, int m, bool largest) {
  const Eigen::Index n = start.size();
  m = static_cast<int>(std::min<Eigen::Index>(m, n - (deflate ? 1 : 0)));
  m = std::max(m, 1);
  Eigen::MatrixXd V(n, m);
  std::vector<double> alpha, beta;
  Vec v = start / start.norm();
  int k = 0;
  for (; k < m; ++k) {
    V.col(k) = v;
    Vec w = apply(v);
    const double a = v.dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      if (deflate) w -= deflate->dot(w) * *deflate;
      w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
    }
    const double b = w.norm();
    if (k + 1 == m || b <= 1e-14 * std::max(1.0, std::abs(a))) {
      ++k;
      break;
    }
    beta.push_back(b);
    v = w / b;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) T(i, i) = alpha[static_cast<std::size_t>(i)];
  for (int i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const int idx = largest ? k - 1 : 0;
  Eigenpair out;
  out.lambda = es.eigenvalues()(idx);
  out.v = V.leftCols(k) * es.eigenvectors().col(idx);
  out.v /= out.v.norm();
  return out;
}

void orient(Vec& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best)) * (1 + 1e-9)) best = i;
  }
  if (v(best) < 0) v = -v;
}

void fill_eigenfunction(const GridChain& chain, const Vec& v, SpectralReport& r) {
  const auto lpi = chain.target().log_probabilities();
  r.eigenfunction.resize(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    r.eigenfunction[i] = v(static_cast<Eigen::Index>(i)) * std::exp(-0.5 * lpi[i]);
  }
}

SpectralReport dense_gap(const GridChain& chain, const SpectralOptions& opt) {
  const Eigen::MatrixXd S = dense_symmetric_operator(chain);
  const auto n = S.rows();
  const Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n) - S;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0, 1.0);
  SpectralReport r;
  r.solver = SolverMode::Dense;
  Vec v = es.eigenvectors().col(1);
  const Vec q = sqrt_pi(chain);
  v -= q.dot(v) * q;
  v /= v.norm();
  orient(v);
  r.lambda = polish(chain, v);
  r.beta1 = 1.0 - r.lambda;
  r.beta_min = 1.0 - es.eigenvalues()(n - 1);
  if (opt.compute_beta2 && n >= 3) r.beta2 = 1.0 - es.eigenvalues()(2);
  r.residual = (S * v - r.beta1 * v).norm();
  fill_eigenfunction(chain, v, r);
  return r;
}

SpectralReport iterative_gap(const GridChain& chain, const SpectralOptions& opt) {
  const Eigen::SparseMatrix<double> S = symmetric_operator(chain);
  const auto n = S.rows();
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  const Eigen::SparseMatrix<double> L = I - S;
  const Vec q = sqrt_pi(chain);

  // grounded factorisation: drop the row and column of the heaviest state
  const auto g = static_cast<Eigen::Index>(chain.target().argmax());
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index c = 0; c < L.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, c); it; ++it) {
      if (it.row() == g || it.col() == g) continue;
      t.emplace_back(it.row() - (it.row() > g), it.col() - (it.col() > g), it.value());
    }
  }
  Eigen::SparseMatrix<double> Lg(n - 1, n - 1);
  Lg.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Lg);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("grounded factorisation failed", 0.0, 1.0);

  auto pinv = [&](const Vec& b) {
    Vec bb = b - q.dot(b) * q;
    Vec bg(n - 1);
    bg << bb.head(g), bb.tail(n - 1 - g);
    const Vec yg = ldlt.solve(bg);
    Vec y(n);
    y << yg.head(g), 0.0, yg.tail(n - 1 - g);
    y -= q.dot(y) * q;
    return y;
  };

  Vec start = start_vector(n, q);
  double best_res = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;
  Vec best_v;
  for (int round = 0; round <= opt.max_restarts; ++round) {
    Eigenpair p = lanczos(pinv, start, &q, opt.krylov_dim, true);
    Vec v = p.v - q.dot(p.v) * q;
    v /= v.norm();
    // one refinement step with the pseudo-inverse sharpens the vector cheaply
    v = pinv(v);
    v /= v.norm();
    const double lam = polish(chain, v);
    const double res = (S * v - (1.0 - lam) * v).norm();
    if (res < best_res) {
      best_res = res;
      best_lambda = lam;
      best_v = v;
    }
    if (best_res <= opt.tolerance) break;
    start = v;
  }
  if (best_res > 1e-8) {
    throw ConvergenceError("iterative eigensolver did not converge (residual " + std::to_string(best_res) + ")",
                           best_lambda, best_res);
  }
  SpectralReport r;
  r.solver = SolverMode::Iterative;
  orient(best_v);
  r.lambda = best_lambda;
  r.beta1 = 1.0 - best_lambda;
  r.residual = best_res;
  auto applyS = [&](const Vec& x) -> Vec { return S * x; };
  const Eigenpair lo = lanczos(applyS, start_vector(n, q), nullptr, std::min<int>(160, static_cast<int>(n)), false);
  r.beta_min = std::max(-1.0, lo.lambda);
  fill_eigenfunction(chain, best_v, r);
  return r;
}

}  // namespace

SpectralReport spectral_gap(const GridChain& chain, const SpectralOptions& opt) {
  if (chain.size() < 2) throw InvalidArgument("spectral gap needs at least two states");
  if (!is_connected(chain)) {
    SpectralReport r;
    r.connected = false;
    r.lambda = 0.0;
    r.beta1 = 1.0;
    return r;
  }
  SolverMode mode = opt.mode;
  if (mode == SolverMode::Auto) {
    mode = chain.size() <= std::min(opt.auto_dense_limit, opt.dense_cap) ? SolverMode::Dense : SolverMode::Iterative;
  }
  if (mode == SolverMode::Dense) {
    if (chain.size() > opt.dense_cap) {
      throw CapExceeded("dense eigensolve of " + std::to_string(chain.size()) + " states exceeds the cap of " +
                        std::to_string(opt.dense_cap));
    }
    return dense_gap(chain, opt);
  }
  return iterative_gap(chain, opt);
}

}  // namespace metrogap
