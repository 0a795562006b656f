#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "metrogap/chain.hpp"
#include "metrogap/paths.hpp"
#include "metrogap/weights.hpp"

namespace metrogap {

struct BoundOptions {
  /// Sum only over ordered pairs with pi(x) <= pi(y) and report 2 max W~(e).
  /// Needs a pairs-mode path system.
  bool symmetry_reduction = false;
  /// Worker threads for pair enumeration; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Largest number of unordered pairs enumerated before refusing.
  std::uint64_t pair_cap = 140'000'000;
};

/// Distribution of the per-edge congestion W(e).
struct CongestionSummary {
  double min = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
  /// decades[k] counts edges with W(e)/W in (10^{-k-1}, 10^{-k}]; the last
  /// bucket takes everything smaller.
  std::array<std::size_t, 8> decades{};
};

struct BoundReport {
  double W = 0.0;
  /// 2/W for pairs mode, 1/W for to-point mode.
  double lower_bound = 0.0;
  std::size_t argmax_edge = 0;
  TargetMode mode = TargetMode::Pairs;
  PathRule rule = PathRule::OneDSegment;
  bool symmetry_reduction = false;
  std::uint64_t pairs = 0;
  std::string weight;
  /// W(e) per edge (with symmetry reduction: 2 W~(e)), so max = W.
  std::vector<double> edge_W;
  CongestionSummary summary;
};

/// W(e) = (w(e)^2/Q(e)) sum over ordered pairs (x, y in A) whose path uses e of
/// |gamma_xy|_w pi(x) pi_A(y), maximised over edges. Paths that use an edge
/// without conductance are an error; exceeding the pair cap throws
/// CapExceeded carrying the partial maximum.
BoundReport compute_W(const GridChain& chain, const PathSystem& paths, const WeightFunction& weight,
                      const BoundOptions& options = {});

/// Columns: edge, axis, lower and upper coordinates, W_e.
void write_edge_csv(std::ostream& out, const GridChain& chain, const BoundReport& report);

}  // namespace metrogap
