#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "metrogap/chain.hpp"
#include "metrogap/grid.hpp"

namespace metrogap {

enum class PathRule { OneDSegment, CornerMonotone, StaircaseToPoint, RectangleSides, ValleyRule };
enum class TargetMode { Pairs, ToPoint };

std::string to_string(PathRule rule);
std::string to_string(TargetMode mode);

/// Straight run of `steps` unit moves along `axis` starting at `start`
/// (negative steps move down the axis).
struct Leg {
  std::size_t start = 0;
  int axis = 0;
  int steps = 0;
};

/// Configuration of a valley pair, for pairs with pi(x) <= pi(y).
enum class ValleyClass { SameSide, HorizontalCrossing, VerticalCrossing };

/// Deterministic path generator. In pairs mode the path from y to x is the path
/// from x to y reversed; in to-point mode every state is routed to `target`.
class PathSystem {
 public:
  /// OneDSegment, RectangleSides: pairs mode.
  static PathSystem segment(const Grid& grid);
  static PathSystem rectangle_sides(const Grid& grid);
  /// Vertical run first, then horizontal, to `target`.
  static PathSystem corner_monotone(const Grid& grid, std::size_t target);
  /// Greedy lattice path hugging the straight segment to `target`.
  static PathSystem staircase(const Grid& grid, std::size_t target);
  /// Valley paths. `levels` holds the signed level of every state: its sign is
  /// the side of the line and its magnitude the distance to it.
  static PathSystem valley(const Grid& grid, std::vector<double> levels);

  PathRule rule() const { return rule_; }
  TargetMode mode() const { return mode_; }
  std::size_t target() const { return target_; }
  const Grid& grid() const { return grid_; }
  const std::vector<double>& levels() const { return levels_; }

  /// Legs of the path from x to y (to-point mode requires y == target()).
  /// Appends to `out` after clearing it.
  void legs(std::size_t x, std::size_t y, std::vector<Leg>& out) const;
  std::vector<Leg> legs(std::size_t x, std::size_t y) const;
  /// Vertex sequence x = v0, ..., vk = y.
  std::vector<std::size_t> vertices(std::size_t x, std::size_t y) const;

  /// Valley classification of the ordered pair, assuming pi(x) <= pi(y).
  ValleyClass valley_class(std::size_t x, std::size_t y) const;

  /// Canonical legs for an unordered pair x < y in pairs mode; up to
  /// kMaxDimension legs written to `out`, count returned. Fast path used by
  /// the congestion engine.
  int canonical_legs(std::size_t x, std::size_t y, Leg* out) const;

 private:
  PathSystem(const Grid& grid, PathRule rule, TargetMode mode, std::size_t target);
  void staircase_legs(std::size_t x, std::vector<Leg>& out) const;
  int valley_legs(std::size_t x, std::size_t y, Leg* out, std::size_t* first) const;

  Grid grid_;
  PathRule rule_;
  TargetMode mode_;
  std::size_t target_ = 0;
  std::vector<double> levels_;
};

/// Reverses a leg sequence (the path walked backwards).
std::vector<Leg> reverse_legs(const Grid& grid, const std::vector<Leg>& legs);

/// Vertex sequence of a leg sequence starting at `from`.
std::vector<std::size_t> leg_vertices(const Grid& grid, std::size_t from, const std::vector<Leg>& legs);

struct PathAudit {
  std::size_t paths = 0;
  std::size_t invalid = 0;
  double max_corridor_distance = 0.0;
  std::string first_problem;
};

/// Checks every generated path: starts and ends correctly, moves along chain
/// edges with positive conductance, reversal symmetry in pairs mode and the
/// sqrt(2) corridor for staircase paths.
PathAudit audit_paths(const GridChain& chain, const PathSystem& paths);

}  // namespace metrogap
