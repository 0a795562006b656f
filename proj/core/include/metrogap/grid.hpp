#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace metrogap {

inline constexpr int kMaxDimension = 4;

/// Lattice coordinates of one state. Only the first `dimension()` entries of
/// the owning grid are meaningful.
using Point = std::array<int, kMaxDimension>;

/// Inclusive integer range along one axis.
struct AxisRange {
  int lo = 0;
  int hi = 0;
  int size() const { return hi - lo + 1; }
  bool contains(int v) const { return v >= lo && v <= hi; }
  friend bool operator==(const AxisRange&, const AxisRange&) = default;
};

/// A box of lattice points, product of per-axis ranges. States are numbered
/// row-major in the declared axis order: axis 0 varies slowest, the last axis
/// fastest.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<AxisRange> axes);

  static Grid line(int lo, int hi) { return Grid({{lo, hi}}); }
  static Grid cube(int dimension, int lo, int hi);

  int dimension() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const std::vector<AxisRange>& axes() const { return axes_; }
  const AxisRange& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }

  /// Index distance between neighbours along axis `a`.
  std::size_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }

  std::size_t index(const Point& p) const;
  Point point(std::size_t index) const;
  bool contains(const Point& p) const;

  /// Position of `index` along axis `a`, counted from the axis lower bound.
  int offset(std::size_t index, int a) const;

  /// Neighbour of `index` one step along axis `a` in direction `dir` (+1/-1),
  /// or nothing when that proposal leaves the box.
  std::optional<std::size_t> neighbor(std::size_t index, int a, int dir) const;

  std::string describe() const;

  friend bool operator==(const Grid& l, const Grid& r) { return l.axes_ == r.axes_; }

 private:
  std::vector<AxisRange> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

}  // namespace metrogap
