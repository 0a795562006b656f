#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "metrogap/grid.hpp"

namespace metrogap {

/// A real function on the states of a grid, stored in enumeration order.
/// Values are always finite.
class StateFunction {
 public:
  StateFunction() = default;
  explicit StateFunction(std::vector<double> values);
  static StateFunction constant(std::size_t size, double value);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Unnormalised positive weights F together with the probability pi = F / sum F.
/// Weights are held as logarithms so targets spanning hundreds of orders of
/// magnitude keep full relative precision.
class TargetMeasure {
 public:
  TargetMeasure() = default;
  static TargetMeasure from_log_weights(std::vector<double> log_weights);
  static TargetMeasure from_weights(std::span<const double> weights);

  std::size_t size() const { return log_f_.size(); }
  std::span<const double> log_weights() const { return log_f_; }
  /// log(sum F) = -log Z.
  double log_normalizer() const { return log_norm_; }
  std::span<const double> probabilities() const { return pi_; }
  std::span<const double> log_probabilities() const { return log_pi_; }
  double min_probability() const { return pi_[argmin_]; }
  std::size_t argmin() const { return argmin_; }
  std::size_t argmax() const { return argmax_; }

 private:
  std::vector<double> log_f_;
  std::vector<double> log_pi_;
  std::vector<double> pi_;
  double log_norm_ = 0.0;
  std::size_t argmin_ = 0;
  std::size_t argmax_ = 0;
};

/// Unoriented nearest-neighbour edge. `lower` is the endpoint with the smaller
/// coordinate along `axis`, so `upper == lower + grid.stride(axis)`.
struct ChainEdge {
  std::size_t lower = 0;
  std::size_t upper = 0;
  int axis = 0;
  /// Q(e) = pi(x) K(x,y), identical for both orientations.
  double conductance = 0.0;
  /// Q(e) / sqrt(pi(x) pi(y)): the off-diagonal entry of the symmetrised kernel.
  double symmetric_weight = 0.0;
};

struct Incidence {
  std::size_t neighbor;
  std::size_t edge;
};

/// A reversible nearest-neighbour Markov kernel on a grid. Immutable after
/// construction.
class GridChain {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  /// Metropolis kernel for the simple-random-walk proposal with boundary
  /// holding: K(x,y) = min{1, F(y)/F(x)} / (2n) for neighbours.
  static GridChain metropolis(Grid grid, TargetMeasure target);

  /// General reversible nearest-neighbour kernel given one conductance per
  /// unoriented edge (ordered as in `edges()` of a chain on the same grid).
  /// Holding absorbs the remaining mass; rows must not exceed 1.
  static GridChain from_conductances(Grid grid, TargetMeasure target,
                                     std::span<const double> conductances);

  const Grid& grid() const { return grid_; }
  const TargetMeasure& target() const { return target_; }
  std::size_t size() const { return grid_.size(); }
  std::span<const double> pi() const { return target_.probabilities(); }

  std::span<const ChainEdge> edges() const { return edges_; }
  std::span<const double> holding() const { return holding_; }
  std::span<const Incidence> incident(std::size_t state) const {
    return {incidence_.data() + offsets_[state], offsets_[state + 1] - offsets_[state]};
  }

  /// Id of the edge from `lower_state` one step up along `axis`, or npos.
  std::size_t edge_id(std::size_t lower_state, int axis) const {
    return edge_index_[static_cast<std::size_t>(axis)][lower_state];
  }
  /// Id of the edge joining two neighbouring states, or npos.
  std::size_t edge_between(std::size_t x, std::size_t y) const;

  /// K(x,y) for any pair of states (zero for non-neighbours).
  double transition(std::size_t x, std::size_t y) const;

 private:
  GridChain(Grid grid, TargetMeasure target);
  void finish(std::vector<double> conductances);

  Grid grid_;
  TargetMeasure target_;
  std::vector<ChainEdge> edges_;
  std::vector<double> holding_;
  std::vector<std::vector<std::size_t>> edge_index_;
  std::vector<Incidence> incidence_;
  std::vector<std::size_t> offsets_;
};

/// Builds the Metropolis chain for positive weights `f` on `grid`.
/// Throws NonPositiveTarget naming the first offending state.
GridChain build_metropolis(const Grid& grid, std::span<const double> f);
/// Same, from log-weights (no positivity issue; values must be finite).
GridChain build_metropolis_log(const Grid& grid, std::vector<double> log_f);

/// pi(u).
double expectation(const GridChain& chain, const StateFunction& u);

/// Dirichlet form 1/2 sum_{x,y} (u(x)-u(y))(v(x)-v(y)) pi(x) K(x,y),
/// evaluated as a sum over unoriented edges.
double dirichlet_form(const GridChain& chain, const StateFunction& u, const StateFunction& v);

/// Var_pi(u) = pi(u^2) - pi(u)^2, evaluated in two passes.
double variance(const GridChain& chain, const StateFunction& u);

struct ChainAudit {
  /// max_x |K(x,x) + sum_y K(x,y) - 1|
  double row_sum_error = 0.0;
  /// max_e |pi(x)K(x,y) - pi(y)K(y,x)| / Q(e)
  double reversibility_error = 0.0;
  /// max_e |Q(e) - min{pi(x),pi(y)}/(2n)| / Q(e); meaningful for Metropolis chains
  double metropolis_error = 0.0;
  bool ok(double tolerance = 1e-12) const {
    return row_sum_error <= tolerance && reversibility_error <= tolerance && metropolis_error <= tolerance;
  }
};

/// Recomputes the defining identities of the kernel from transition().
ChainAudit audit_chain(const GridChain& chain);

}  // namespace metrogap
