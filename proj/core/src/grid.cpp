#include "metrogap/grid.hpp"

#include <sstream>

#include "metrogap/error.hpp"

namespace metrogap {

NonPositiveTarget::NonPositiveTarget(std::size_t state, double value)
    : InvalidArgument("target function must be finite and strictly positive; state " +
                      std::to_string(state) + " has value " + std::to_string(value)),
      state_(state),
      value_(value) {}

Grid::Grid(std::vector<AxisRange> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > static_cast<std::size_t>(kMaxDimension)) {
    throw InvalidArgument("grid dimension must be between 1 and " + std::to_string(kMaxDimension));
  }
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (std::size_t a = axes_.size(); a-- > 0;) {
    if (axes_[a].hi < axes_[a].lo) {
      throw InvalidArgument("empty grid: axis " + std::to_string(a) + " has hi < lo");
    }
    strides_[a] = size_;
    size_ *= static_cast<std::size_t>(axes_[a].size());
  }
}

Grid Grid::cube(int dimension, int lo, int hi) {
  return Grid(std::vector<AxisRange>(static_cast<std::size_t>(dimension), AxisRange{lo, hi}));
}

std::size_t Grid::index(const Point& p) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    idx += static_cast<std::size_t>(p[a] - axes_[a].lo) * strides_[a];
  }
  return idx;
}

Point Grid::point(std::size_t index) const {
  Point p{};
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    p[a] = axes_[a].lo + static_cast<int>(index / strides_[a]);
    index %= strides_[a];
  }
  return p;
}

bool Grid::contains(const Point& p) const {
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (!axes_[a].contains(p[a])) return false;
  }
  return true;
}

int Grid::offset(std::size_t index, int a) const {
  const auto ua = static_cast<std::size_t>(a);
  return static_cast<int>((index / strides_[ua]) % static_cast<std::size_t>(axes_[ua].size()));
}

std::optional<std::size_t> Grid::neighbor(std::size_t index, int a, int dir) const {
  const int off = offset(index, a) + dir;
  if (off < 0 || off >= axis(a).size()) return std::nullopt;
  const std::size_t s = stride(a);
  return dir > 0 ? index + s : index - s;
}

std::string Grid::describe() const {
  std::ostringstream os;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (a) os << " x ";
    os << "{" << axes_[a].lo << ".." << axes_[a].hi << "}";
  }
  return os.str();
}

}  // namespace metrogap
