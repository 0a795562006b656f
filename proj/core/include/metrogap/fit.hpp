#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace metrogap {

/// lambda ~ N^s (log N)^r.
struct ScalingLaw {
  double s = -2.0;
  int r = 0;
};

/// Parses "power:S" or "powerlog:S:R" (R in {-1, 0, 1}).
ScalingLaw parse_law(std::string_view text);
std::string to_string(const ScalingLaw& law);

struct FitTolerance {
  double exponent = 0.2;
  /// Largest accepted max/min of lambda N^{-s} (log N)^{-r} for laws with r != 0.
  double ratio = 4.0;
};

struct FitResult {
  /// Log power of the best-fitting model among r in {0, 1, -1}.
  int model_r = 0;
  double model_s = 0.0;
  double model_residual = 0.0;
  /// Exponent fitted with the predicted log power held fixed.
  double s = 0.0;
  double residual = 0.0;
  /// max/min over the grid of lambda N^{-s_law} (log N)^{-r_law}.
  double ratio = 0.0;
  ScalingLaw law;
  bool pass = false;
};

/// Least squares of log lambda - r log log N against log N. Needs at least four
/// points with strictly increasing N >= 2 and positive lambda.
FitResult fit_exponent(const std::vector<double>& N, const std::vector<double>& lambda, const ScalingLaw& law,
                       const FitTolerance& tolerance = {});

}  // namespace metrogap
