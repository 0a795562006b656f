#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "metrogap/chain.hpp"
#include "metrogap/families.hpp"

namespace metrogap {

enum class SolverMode { Dense, Iterative, Auto };

std::string to_string(SolverMode mode);
SolverMode solver_mode_from_string(const std::string& text);

struct SpectralOptions {
  SolverMode mode = SolverMode::Auto;
  /// Largest state count accepted by the dense solver.
  std::size_t dense_cap = 20000;
  /// Auto mode uses the dense solver up to this many states.
  std::size_t auto_dense_limit = 1200;
  /// Also compute beta_2 (dense solver only).
  bool compute_beta2 = false;
  /// Target residual for the beta_1 eigenpair; above 1e-8 the solve fails.
  double tolerance = 1e-10;
  int max_restarts = 8;
  int krylov_dim = 240;
};

struct SpectralReport {
  double lambda = 0.0;
  double beta1 = 1.0;
  double beta_min = -1.0;
  std::optional<double> beta2;
  SolverMode solver = SolverMode::Dense;
  /// || S v - beta1 v || for the unit eigenvector v of the symmetrised operator.
  double residual = 0.0;
  bool connected = true;
  /// Eigenfunction of beta1 for K itself (v / sqrt(pi)), scaled to pi(phi^2) = 1.
  std::vector<double> eigenfunction;
};

/// Symmetrised operator S = D^{1/2} K D^{-1/2}, D = diag(pi).
Eigen::SparseMatrix<double> symmetric_operator(const GridChain& chain);
Eigen::MatrixXd dense_symmetric_operator(const GridChain& chain);
/// K as a dense row-stochastic matrix.
Eigen::MatrixXd dense_transition_matrix(const GridChain& chain);

/// Whether the graph of positive-conductance edges connects all states.
bool is_connected(const GridChain& chain);

/// lambda = 1 - beta_1 of the chain. Throws ConvergenceError (carrying the best
/// estimate) if the iterative solver cannot reach a residual of 1e-8, and
/// CapExceeded if the dense solver is requested beyond its cap.
SpectralReport spectral_gap(const GridChain& chain, const SpectralOptions& options = {});

struct QuadraticForms {
  double energy = 0.0;
  double variance = 0.0;
  double mean = 0.0;
};

QuadraticForms quadratic_forms(const GridChain& chain, const StateFunction& f);

/// E(f,f) / Var(f) for any non-constant f (no centring required).
double rayleigh_quotient(const GridChain& chain, const StateFunction& f);

/// E(f,f) / Var(f) for a centred test function. Rejects zero variance and
/// |pi(f)| > 1e-8 sqrt(pi(f^2)).
double rayleigh_upper_bound(const GridChain& chain, const TestFunction& f);

}  // namespace metrogap
