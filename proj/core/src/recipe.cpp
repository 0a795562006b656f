#include "metrogap/recipe.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "metrogap/error.hpp"

namespace metrogap {

namespace {

double guarded_log(double n) { return std::log(std::max(n, 2.0)); }

// Schedules are written for a_minus <= a_plus style parameters after reflection.
struct Sides {
  double am, ap;
  int nm, np;
};

Sides mirrored(const OneDAsym2& f, bool reflect) {
  if (reflect) return {f.a_plus, f.a_minus, f.N_plus, f.N_minus};
  return {f.a_minus, f.a_plus, f.N_minus, f.N_plus};
}

}  // namespace

std::string to_string(Asym2Regime regime) {
  switch (regime) {
    case Asym2Regime::BothAboveOne: return "BothAboveOne";
    case Asym2Regime::MinBelowOne: return "MinBelowOne";
    case Asym2Regime::BothOne: return "BothOne";
    case Asym2Regime::OneAndLarge: return "OneAndLarge";
    case Asym2Regime::OneAndSmall: return "OneAndSmall";
  }
  return "?";
}

Asym2Case classify_asym2(const OneDAsym2& f) {
  const double lo = std::min(f.a_minus, f.a_plus);
  const double hi = std::max(f.a_minus, f.a_plus);
  if (lo < 0.0) throw InvalidArgument("negative exponent; nearest supported regime is MinBelowOne (min{a_-,a_+} in [0,1))");
  if (lo < 1.0) return {Asym2Regime::MinBelowOne, false};
  if (lo > 1.0) {
    const bool reflect = std::pow(f.N_minus, 1.0 + f.a_minus) > std::pow(f.N_plus, 1.0 + f.a_plus);
    return {Asym2Regime::BothAboveOne, reflect};
  }
  if (hi == 1.0) return {Asym2Regime::BothOne, f.N_minus > f.N_plus};
  // exactly one exponent equals 1; the schedule has it on the negative side
  const bool reflect = f.a_plus == 1.0;
  const Sides s = mirrored(f, reflect);
  const bool large = std::pow(static_cast<double>(s.np), 1.0 + s.ap) >= static_cast<double>(s.nm) * s.nm;
  return {large ? Asym2Regime::OneAndLarge : Asym2Regime::OneAndSmall, reflect};
}

double asym2_predicted_order(const OneDAsym2& f) {
  const double nm = f.N_minus, np = f.N_plus;
  const double lo = std::min(f.a_minus, f.a_plus);
  const double span = std::max(nm + np, 1.0);
  if (lo < 1.0) return 1.0 / (span * span);
  if (lo > 1.0) {
    return std::min(1.0 / (span * span),
                    std::max(std::pow(1.0 + nm, -(1.0 + f.a_minus)), std::pow(1.0 + np, -(1.0 + f.a_plus))));
  }
  const double first = 1.0 / (np * np + std::pow(nm, 1.0 + f.a_minus) * guarded_log(nm));
  const double second = 1.0 / (nm * nm + std::pow(np, 1.0 + f.a_plus) * guarded_log(np));
  return std::max(first, second);
}

WeightFunction asym2_weights(const OneDAsym2& f) {
  const Asym2Case c = classify_asym2(f);
  const Sides s = mirrored(f, c.reflected);
  const int lo = -s.nm, hi = s.np;
  std::vector<WeightPiece> p;
  switch (c.regime) {
    case Asym2Regime::MinBelowOne: {
      const double m = std::min(s.am, s.ap);
      p.push_back({lo, hi, 1.0, 1.0, m / 2.0});
      break;
    }
    case Asym2Regime::BothAboveOne: {
      const double eta = (1.0 + std::min(s.am, s.ap)) / 2.0;
      p.push_back({lo, std::min(s.nm, hi), 1.0, 1.0, eta / 2.0});
      if (s.np > s.nm) p.push_back({s.nm + 1, hi, std::sqrt(static_cast<double>(s.np)), 0.0, 0.0});
      break;
    }
    case Asym2Regime::BothOne: {
      p.push_back({lo, std::min(s.nm, hi), 1.0, 0.0, 0.5});
      if (s.np > s.nm) p.push_back({s.nm + 1, hi, std::sqrt(s.np / guarded_log(s.nm)), 0.0, 0.0});
      break;
    }
    case Asym2Regime::OneAndLarge: {
      const double ln = guarded_log(s.nm);
      const int K = static_cast<int>(std::floor(std::pow(static_cast<double>(s.nm), 2.0 / (1.0 + s.ap))));
      p.push_back({lo, -1, 1.0, 0.0, 0.5});
      const int k_top = std::min(K, hi);
      if (k_top >= 1) p.push_back({1, k_top, 1.0 / std::sqrt(ln), 0.0, s.ap / 2.0});
      if (hi > k_top) p.push_back({std::max(k_top, 0) + 1, hi, std::sqrt(s.np / ln), 0.0, 0.0});
      break;
    }
    case Asym2Regime::OneAndSmall: {
      const double ln = guarded_log(s.np);
      p.push_back({1, hi, 1.0 / std::sqrt(ln), 0.0, s.ap / 2.0});
      p.push_back({-std::min(s.np, s.nm), -1, 1.0, 0.0, 0.5});
      if (s.nm > s.np) p.push_back({lo, -s.np - 1, std::sqrt(s.nm / ln), 0.0, 0.0});
      break;
    }
  }
  return WeightFunction::power_of_position(std::move(p), EdgeKey::Far, c.reflected);
}

Recipe recipe(const DensityFamily& family) {
  validate(family);
  const Discretization d = discretize(family);
  return std::visit(
      [&](const auto& f) -> Recipe {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, OneDAsym1>) {
          auto w = WeightFunction::power_of_position({{-f.N, f.N, 1.0, 1.0, f.a_minus / 2.0}}, EdgeKey::Left);
          return {PathSystem::segment(d.grid), w, false, "asym1:segment"};
        } else if constexpr (std::is_same_v<T, OneDAsym2>) {
          return {PathSystem::segment(d.grid), asym2_weights(f), false, "asym2:" + to_string(classify_asym2(f).regime)};
        } else if constexpr (std::is_same_v<T, ExpLinear>) {
          return {PathSystem::corner_monotone(d.grid, peak_state(family, d.grid)), WeightFunction::power_of_q(0.25),
                  false, "explinear:corner"};
        } else if constexpr (std::is_same_v<T, ExpFalloff>) {
          return {PathSystem::staircase(d.grid, peak_state(family, d.grid)), WeightFunction::power_of_q(0.25), false,
                  "expfalloff:staircase"};
        } else if constexpr (std::is_same_v<T, FlatClass>) {
          return {PathSystem::rectangle_sides(d.grid), WeightFunction::unit(), false, "flat:rectangle"};
        } else {
          std::vector<double> levels(d.grid.size());
          for (std::size_t x = 0; x < levels.size(); ++x) levels[x] = valley_level(f, d.grid.point(x));
          return {PathSystem::valley(d.grid, std::move(levels)), WeightFunction::valley_distance(f.alpha), true,
                  "valley:rule"};
        }
      },
      family);
}

}  // namespace metrogap
