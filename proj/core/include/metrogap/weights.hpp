#pragma once

#include <string>
#include <vector>

#include "metrogap/chain.hpp"

namespace metrogap {

enum class WeightKind { Unit, PowerOfPosition, PowerOfQ, ValleyDistance };

/// Which vertex of a one-dimensional edge (j, j+1) selects the schedule value.
enum class EdgeKey {
  Left,  ///< j
  Far,   ///< the endpoint farther from 0
};

/// w = scale * (shift + |k|)^exponent for keys k in [lo, hi].
struct WeightPiece {
  int lo = 0;
  int hi = 0;
  double scale = 1.0;
  double shift = 1.0;
  double exponent = 0.0;
};

/// Positive, reversal-symmetric edge weight.
class WeightFunction {
 public:
  static WeightFunction unit();
  /// Piecewise power schedule on a one-dimensional grid; `reflect` mirrors the
  /// key (k -> -k) before lookup.
  static WeightFunction power_of_position(std::vector<WeightPiece> pieces, EdgeKey key, bool reflect = false);
  static WeightFunction power_of_q(double theta);
  /// (max F over the endpoints)^{1/2} for a valley target, i.e.
  /// (1 + A max{d(x,L), d(y,L)})^{alpha/2}.
  static WeightFunction valley_distance(double alpha);

  WeightKind kind() const { return kind_; }
  double theta() const { return theta_; }
  const std::vector<WeightPiece>& pieces() const { return pieces_; }
  EdgeKey key() const { return key_; }
  bool reflected() const { return reflect_; }

  /// w(e) for every edge of the chain, in edge order.
  std::vector<double> evaluate(const GridChain& chain) const;
  std::string describe() const;

 private:
  WeightKind kind_ = WeightKind::Unit;
  double theta_ = 0.0;
  std::vector<WeightPiece> pieces_;
  EdgeKey key_ = EdgeKey::Left;
  bool reflect_ = false;
};

/// sum over the path's edges of 1/w(e)^2; `w` is indexed by edge id.
double w_length(const GridChain& chain, const std::vector<std::size_t>& vertices, const std::vector<double>& w);

}  // namespace metrogap
