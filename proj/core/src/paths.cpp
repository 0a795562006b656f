#include "metrogap/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "metrogap/error.hpp"

namespace metrogap {

std::string to_string(PathRule rule) {
  switch (rule) {
    case PathRule::OneDSegment:
      return "segment";
    case PathRule::CornerMonotone:
      return "corner_monotone";
    case PathRule::StaircaseToPoint:
      return "staircase";
    case PathRule::RectangleSides:
      return "rectangle_sides";
    case PathRule::ValleyRule:
      return "valley";
  }
  return "?";
}

std::string to_string(TargetMode mode) { return mode == TargetMode::Pairs ? "pairs" : "to_point"; }

PathSystem::PathSystem(const Grid& grid, PathRule rule, TargetMode mode, std::size_t target)
    : grid_(grid), rule_(rule), mode_(mode), target_(target) {
  if (mode == TargetMode::ToPoint && target >= grid.size()) throw InvalidArgument("path target outside the grid");
}

PathSystem PathSystem::segment(const Grid& grid) {
  if (grid.dimension() != 1) throw InvalidArgument("segment paths need a one-dimensional grid");
  return PathSystem(grid, PathRule::OneDSegment, TargetMode::Pairs, 0);
}

PathSystem PathSystem::rectangle_sides(const Grid& grid) {
  return PathSystem(grid, PathRule::RectangleSides, TargetMode::Pairs, 0);
}

PathSystem PathSystem::corner_monotone(const Grid& grid, std::size_t target) {
  if (grid.dimension() != 2) throw InvalidArgument("corner paths need a two-dimensional grid");
  return PathSystem(grid, PathRule::CornerMonotone, TargetMode::ToPoint, target);
}

PathSystem PathSystem::staircase(const Grid& grid, std::size_t target) {
  if (grid.dimension() != 2) throw InvalidArgument("staircase paths need a two-dimensional grid");
  return PathSystem(grid, PathRule::StaircaseToPoint, TargetMode::ToPoint, target);
}

PathSystem PathSystem::valley(const Grid& grid, std::vector<double> levels) {
  if (grid.dimension() != 2) throw InvalidArgument("valley paths need a two-dimensional grid");
  if (levels.size() != grid.size()) throw InvalidArgument("one level per state required");
  PathSystem p(grid, PathRule::ValleyRule, TargetMode::Pairs, 0);
  p.levels_ = std::move(levels);
  return p;
}

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

std::size_t leg_end(const Grid& g, const Leg& l) {
  const auto s = static_cast<std::ptrdiff_t>(g.stride(l.axis));
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(l.start) + s * l.steps);
}

// two-leg L path from x: first along axis `a`, then along the other axis
int l_path(const Grid& g, std::size_t x, std::size_t y, int a, Leg* out) {
  const Point px = g.point(x);
  const Point py = g.point(y);
  const int b = 1 - a;
  int k = 0;
  std::size_t cur = x;
  const int da = py[static_cast<std::size_t>(a)] - px[static_cast<std::size_t>(a)];
  const int db = py[static_cast<std::size_t>(b)] - px[static_cast<std::size_t>(b)];
  if (da != 0) {
    out[k] = Leg{cur, a, da};
    cur = leg_end(g, out[k]);
    ++k;
  }
  if (db != 0) out[k++] = Leg{cur, b, db};
  return k;
}

}  // namespace

int PathSystem::valley_legs(std::size_t x, std::size_t y, Leg* out, std::size_t* first) const {
  const double sx = levels_[x];
  const double sy = levels_[y];
  const Point px = grid_.point(x);
  const Point py = grid_.point(y);
  const std::size_t c1 = grid_.index(Point{py[0], px[1], 0, 0});
  const std::size_t c2 = grid_.index(Point{px[0], py[1], 0, 0});
  if (sx * sy >= 0.0) {
    // same side: through the corner farther from the line
    const int side = sgn(sx + sy);
    auto key = [&](std::size_t c) { return side != 0 ? side * levels_[c] : std::abs(levels_[c]); };
    const double k1 = key(c1);
    const double k2 = key(c2);
    const bool use_c1 = k1 > k2 || (k1 == k2 && c1 <= c2);
    *first = x;
    return l_path(grid_, x, y, use_c1 ? 0 : 1, out);
  }
  // opposite sides: start from the point nearer the line
  const bool x_near = std::abs(sx) < std::abs(sy) || (std::abs(sx) == std::abs(sy) && x < y);
  const std::size_t p = x_near ? x : y;
  const std::size_t o = x_near ? y : x;
  const Point pp = grid_.point(p);
  const Point po = grid_.point(o);
  const std::size_t h = grid_.index(Point{po[0], pp[1], 0, 0});
  const bool horizontal = sgn(levels_[p]) * levels_[h] <= 0.0;
  *first = p;
  return l_path(grid_, p, o, horizontal ? 0 : 1, out);
}

ValleyClass PathSystem::valley_class(std::size_t x, std::size_t y) const {
  if (rule_ != PathRule::ValleyRule) throw InvalidArgument("valley classification needs valley paths");
  if (levels_[x] * levels_[y] >= 0.0) return ValleyClass::SameSide;
  Leg legs[2];
  std::size_t first = 0;
  const int k = valley_legs(x, y, legs, &first);
  return (k > 0 && legs[0].axis == 0) ? ValleyClass::HorizontalCrossing : ValleyClass::VerticalCrossing;
}

int PathSystem::canonical_legs(std::size_t x, std::size_t y, Leg* out) const {
  switch (rule_) {
    case PathRule::OneDSegment:
      out[0] = Leg{x, 0, static_cast<int>(y) - static_cast<int>(x)};
      return x == y ? 0 : 1;
    case PathRule::RectangleSides: {
      const Point px = grid_.point(x);
      const Point py = grid_.point(y);
      std::size_t cur = x;
      int k = 0;
      for (int a = 0; a < grid_.dimension(); ++a) {
        const int d = py[static_cast<std::size_t>(a)] - px[static_cast<std::size_t>(a)];
        if (d == 0) continue;
        out[k] = Leg{cur, a, d};
        cur = leg_end(grid_, out[k]);
        ++k;
      }
      return k;
    }
    case PathRule::ValleyRule: {
      std::size_t first = 0;
      return valley_legs(x, y, out, &first);
    }
    default:
      throw InvalidArgument("canonical pair legs need a pairs-mode rule");
  }
}

void PathSystem::staircase_legs(std::size_t x, std::vector<Leg>& out) const {
  const Point p0 = grid_.point(x);
  const Point t = grid_.point(target_);
  const long dx = t[0] - p0[0];
  const long dy = t[1] - p0[1];
  Point z = p0;
  std::size_t cur = x;
  while (z[0] != t[0] || z[1] != t[1]) {
    int best_axis = -1;
    long best = 0;
    for (int a = 0; a < 2; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (z[ua] == t[ua]) continue;
      Point c = z;
      c[ua] += t[ua] > z[ua] ? 1 : -1;
      // |cross| is proportional to the distance from the line through p0 and t
      const long cross = std::labs(dx * (c[1] - p0[1]) - dy * (c[0] - p0[0]));
      if (best_axis < 0 || cross < best) {
        best_axis = a;
        best = cross;
      }
    }
    const auto ua = static_cast<std::size_t>(best_axis);
    const int dir = t[ua] > z[ua] ? 1 : -1;
    z[ua] += dir;
    if (!out.empty() && out.back().axis == best_axis && sgn(out.back().steps) == dir) {
      out.back().steps += dir;
    } else {
      out.push_back(Leg{cur, best_axis, dir});
    }
    cur = grid_.index(z);
  }
}

void PathSystem::legs(std::size_t x, std::size_t y, std::vector<Leg>& out) const {
  out.clear();
  if (x == y) return;
  if (mode_ == TargetMode::ToPoint) {
    if (y != target_) throw InvalidArgument("to-point paths must end at the target state");
    if (rule_ == PathRule::CornerMonotone) {
      Leg l[2];
      const int k = l_path(grid_, x, y, 1, l);
      out.assign(l, l + k);
    } else {
      staircase_legs(x, out);
    }
    return;
  }
  Leg l[kMaxDimension];
  const int k = canonical_legs(std::min(x, y), std::max(x, y), l);
  out.assign(l, l + k);
  if (!out.empty() && out.front().start != x) out = reverse_legs(grid_, out);
}

std::vector<Leg> PathSystem::legs(std::size_t x, std::size_t y) const {
  std::vector<Leg> out;
  legs(x, y, out);
  return out;
}

std::vector<std::size_t> PathSystem::vertices(std::size_t x, std::size_t y) const {
  return leg_vertices(grid_, x, legs(x, y));
}

std::vector<Leg> reverse_legs(const Grid& grid, const std::vector<Leg>& legs) {
  std::vector<Leg> out;
  out.reserve(legs.size());
  for (auto it = legs.rbegin(); it != legs.rend(); ++it) out.push_back(Leg{leg_end(grid, *it), it->axis, -it->steps});
  return out;
}

std::vector<std::size_t> leg_vertices(const Grid& grid, std::size_t from, const std::vector<Leg>& legs) {
  std::vector<std::size_t> v{from};
  for (const Leg& l : legs) {
    const auto s = static_cast<std::ptrdiff_t>(grid.stride(l.axis));
    const int dir = l.steps > 0 ? 1 : -1;
    std::size_t cur = l.start;
    for (int i = 0; i < std::abs(l.steps); ++i) {
      cur = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cur) + dir * s);
      v.push_back(cur);
    }
  }
  return v;
}

PathAudit audit_paths(const GridChain& chain, const PathSystem& paths) {
  PathAudit a;
  const Grid& g = chain.grid();
  auto problem = [&](const std::string& what) {
    ++a.invalid;
    if (a.first_problem.empty()) a.first_problem = what;
  };
  auto check = [&](std::size_t x, std::size_t y, const std::vector<std::size_t>& v) {
    ++a.paths;
    if (v.front() != x || v.back() != y) {
      problem("path " + std::to_string(x) + "->" + std::to_string(y) + " has wrong endpoints");
      return;
    }
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (v[i + 1] >= g.size()) {
        problem("path " + std::to_string(x) + "->" + std::to_string(y) + " leaves the grid");
        return;
      }
      const std::size_t e = chain.edge_between(v[i], v[i + 1]);
      if (e == GridChain::npos || !(chain.edges()[e].conductance > 0.0)) {
        problem("path " + std::to_string(x) + "->" + std::to_string(y) + " uses a non-edge");
        return;
      }
    }
  };
  if (paths.mode() == TargetMode::ToPoint) {
    const std::size_t t = paths.target();
    const Point pt = g.point(t);
    for (std::size_t x = 0; x < g.size(); ++x) {
      if (x == t) continue;
      const auto v = paths.vertices(x, t);
      check(x, t, v);
      if (paths.rule() == PathRule::StaircaseToPoint) {
        const Point p0 = g.point(x);
        const double dx = pt[0] - p0[0];
        const double dy = pt[1] - p0[1];
        const double len = std::hypot(dx, dy);
        for (std::size_t s : v) {
          const Point z = g.point(s);
          const double d = std::abs(dx * (z[1] - p0[1]) - dy * (z[0] - p0[0])) / len;
          a.max_corridor_distance = std::max(a.max_corridor_distance, d);
          if (d > std::sqrt(2.0) + 1e-12) problem("staircase path from " + std::to_string(x) + " leaves the corridor");
        }
      }
    }
    return a;
  }
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (std::size_t y = x + 1; y < g.size(); ++y) {
      const auto v = paths.vertices(x, y);
      check(x, y, v);
      auto w = paths.vertices(y, x);
      check(y, x, w);
      std::reverse(w.begin(), w.end());
      if (v != w) problem("path " + std::to_string(y) + "->" + std::to_string(x) + " is not the reverse");
    }
  }
  return a;
}

}  // namespace metrogap
