#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "metrogap/chain.hpp"

namespace metrogap {

/// Row x of H_t = exp(-t(I - K)) by uniformization, truncated where the
/// Poisson tail drops below 1e-12.
std::vector<double> heat_kernel_row(const GridChain& chain, std::size_t x, double t);

/// Dense H_t (uniformization on a short base time, then repeated squaring).
Eigen::MatrixXd heat_kernel(const GridChain& chain, double t);

struct MixingOptions {
  /// Largest state count handled (dense matrices).
  std::size_t dense_cap = 4096;
  /// Target width of the final bracket relative to 1/lambda.
  double relative_resolution = 1e-6;
  /// Spectral gap if already known; computed otherwise.
  std::optional<double> lambda;
};

struct DistancePoint {
  double t = 0.0;
  double tv_worst = 0.0;
  double sup_worst = 0.0;
};

struct MixingReport {
  /// inf{t : max_x sum_y |H_t(x,y) - pi(y)| <= 1/e}
  double T_TV = 0.0;
  /// inf{t : max_{x,y} |H_t(x,y)/pi(y) - 1| <= 1/e}
  double T_inf = 0.0;
  double relaxation = 0.0;
  /// (1 + log 1/pi_*) / lambda
  double upper = 0.0;
  double lambda = 0.0;
  std::size_t worst_start_TV = 0;
  std::size_t worst_start_inf = 0;
  /// Spacing of the time grid searched; T values are the upper ends of
  /// brackets of this width.
  double resolution = 0.0;
  /// Worst-start distances at the doubling times tau 2^j.
  std::vector<DistancePoint> curve;

  /// 1/lambda <= T_TV <= T_inf <= upper, each up to `rel` relative slack.
  bool sandwich_holds(double rel = 1e-6) const;
};

/// Mixing times by bisection on [0, 4 (1 + log 1/pi_*)/lambda]. Throws
/// ConvergenceError if a distance is still above 1/e at the right end.
MixingReport mixing_times(const GridChain& chain, const MixingOptions& options = {});

/// CSV with header t,tv_worst,sup_worst.
void write_distance_csv(std::ostream& out, const std::vector<DistancePoint>& curve);

}  // namespace metrogap
