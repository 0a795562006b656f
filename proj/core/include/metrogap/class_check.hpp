#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metrogap/families.hpp"

namespace metrogap {

struct ClassCheckOptions {
  int pairs = 200;
  int points_per_pair = 32;
  double tolerance = 0.05;
  std::uint64_t seed = 1;
};

/// Result of a sampled class-membership audit. `violations` lists every
/// condition that failed, with the offending sample.
struct ClassCheck {
  bool ok = true;
  std::vector<std::string> violations;
  /// Largest sampled Lipschitz ratio of g (fall-off) or |d log f| (flat class).
  double lipschitz_estimate = 0.0;
  /// Fall-off: smallest sampled (g(z) - g(z + t(z0-z))) / (t |z - z0|).
  /// Flat class: smallest sampled f(segment point) / min(f(ends)).
  double growth_estimate = 0.0;
  /// Flat class: integral of f over sup f.
  double mass_ratio = 0.0;
};

/// Exponential fall-off conditions: g Lipschitz with constant A, radial growth
/// g(z) - g(z + t(z0 - z)) >= a t |z - z0| with g(z0) = 0, and A/a <= C.
ClassCheck check_falloff(const ExpFalloff& family, const ClassCheckOptions& options = {});

/// Flat class conditions: |d_i log f| <= A, f(x + t(y-x)) >= eps min{f(x), f(y)},
/// eta sup f <= int f.
ClassCheck check_flat(const FlatClass& family, const ClassCheckOptions& options = {});

/// Dispatches on the family; families without class conditions pass trivially.
ClassCheck check_class(const DensityFamily& family, const ClassCheckOptions& options = {});

}  // namespace metrogap
