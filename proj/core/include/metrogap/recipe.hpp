#pragma once

#include <string>
#include <string_view>

#include "metrogap/families.hpp"
#include "metrogap/paths.hpp"
#include "metrogap/weights.hpp"

namespace metrogap {

/// Regimes of the second one-dimensional family.
///   BothAboveOne:  a_-, a_+ > 1
///   MinBelowOne:   min{a_-, a_+} < 1
///   BothOne:       a_- = a_+ = 1
///   OneAndLarge:   min = 1 < max, with N_far^{1+a_far} >= N_one^2
///   OneAndSmall:   min = 1 < max, with N_far^{1+a_far} <  N_one^2
enum class Asym2Regime { BothAboveOne, MinBelowOne, BothOne, OneAndLarge, OneAndSmall };

struct Asym2Case {
  Asym2Regime regime = Asym2Regime::MinBelowOne;
  /// The schedule is written for the mirrored interval (k -> -k).
  bool reflected = false;
};

std::string to_string(Asym2Regime regime);

/// Exact parameter comparisons, no tolerance band.
Asym2Case classify_asym2(const OneDAsym2& family);

/// Order of the spectral gap predicted for the family, without constants.
double asym2_predicted_order(const OneDAsym2& family);

/// Piecewise weight schedule used for the lower bound in the given case.
WeightFunction asym2_weights(const OneDAsym2& family);

struct Recipe {
  PathSystem paths;
  WeightFunction weight;
  bool symmetry_reduction = false;
  /// Short description of the configuration, e.g. "asym2:BothOne".
  std::string label;
};

/// Path system and weights of the lower-bound argument for the family on the
/// grid of its discretisation.
Recipe recipe(const DensityFamily& family);

}  // namespace metrogap
