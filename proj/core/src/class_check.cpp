#include "metrogap/class_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "metrogap/quadrature.hpp"

namespace metrogap {

namespace {

using Vec = std::array<double, kMaxDimension>;

double dist(const Vec& x, const Vec& y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

Vec lerp(const Vec& x, const Vec& y, double t, int n) {
  Vec z{};
  for (int i = 0; i < n; ++i) z[i] = x[i] + t * (y[i] - x[i]);
  return z;
}

void flag(ClassCheck& r, const std::string& msg) {
  r.ok = false;
  if (r.violations.size() < 16) r.violations.push_back(msg);
}

std::string pt(const Vec& z, int n) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << z[i];
  os << ")";
  return os.str();
}

double g_of(const ExpFalloff& f, const Vec& z) {
  if (f.shape == FalloffShape::Cone) return f.a * std::hypot(z[0] - f.z0[0], z[1] - f.z0[1]);
  const double up = (f.corner & 1) ? 1.0 - z[0] : z[0];
  const double vp = (f.corner & 2) ? 1.0 - z[1] : z[1];
  return f.A * std::min(up + vp, 1.0);
}

double log_flat(const FlatClass& f, const Vec& x) {
  if (f.shape == FlatShape::PowerRamp) {
    double s = 0.0;
    for (int i = 0; i < f.n; ++i) s += x[i];
    return f.theta * std::log1p(f.A * s);
  }
  const double ax = f.A * x[0];
  const double ay = f.A * x[1];
  return -f.theta * std::log1p(ax * ax + ay * ay * ay * ay);
}

}  // namespace

ClassCheck check_falloff(const ExpFalloff& f, const ClassCheckOptions& o) {
  ClassCheck r;
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Vec z0{f.z0[0], f.z0[1], 0, 0};
  const double gz0 = g_of(f, z0);
  if (std::abs(gz0) > 1e-12) flag(r, "g(z0) = " + std::to_string(gz0) + " != 0");
  if (f.A > f.C * f.a) flag(r, "A/a exceeds C");
  r.growth_estimate = std::numeric_limits<double>::infinity();
  const int m = o.points_per_pair;
  for (int p = 0; p < o.pairs; ++p) {
    const Vec x{U(rng), U(rng), 0, 0};
    const Vec y{U(rng), U(rng), 0, 0};
    // Lipschitz along the segment x -> y
    Vec prev = x;
    double gprev = g_of(f, x);
    for (int j = 1; j <= m; ++j) {
      const Vec z = lerp(x, y, double(j) / m, 2);
      const double gz = g_of(f, z);
      const double d = dist(prev, z, 2);
      if (d > 0) {
        const double ratio = std::abs(gz - gprev) / d;
        r.lipschitz_estimate = std::max(r.lipschitz_estimate, ratio);
        if (ratio > f.A * (1 + o.tolerance)) {
          flag(r, "Lipschitz ratio " + std::to_string(ratio) + " > A near " + pt(z, 2));
        }
      }
      prev = z;
      gprev = gz;
    }
    // radial growth from x toward z0
    const double rx = dist(x, z0, 2);
    if (rx == 0.0) continue;
    const double gx = g_of(f, x);
    for (int j = 1; j <= m; ++j) {
      const double t = double(j) / m;
      const double drop = gx - g_of(f, lerp(x, z0, t, 2));
      const double rate = drop / (t * rx);
      r.growth_estimate = std::min(r.growth_estimate, rate);
      if (rate < f.a * (1 - o.tolerance)) {
        flag(r, "radial growth " + std::to_string(rate) + " < a from " + pt(x, 2) + " at t=" + std::to_string(t));
      }
    }
  }
  return r;
}

ClassCheck check_flat(const FlatClass& f, const ClassCheckOptions& o) {
  ClassCheck r;
  const int n = f.n;
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int m = o.points_per_pair;
  const double h = 1e-6;
  double sup_log = -std::numeric_limits<double>::infinity();
  r.growth_estimate = std::numeric_limits<double>::infinity();
  auto derivative_check = [&](const Vec& z) {
    for (int i = 0; i < n; ++i) {
      Vec zp = z, zm = z;
      zp[i] = std::min(1.0, z[i] + h);
      zm[i] = std::max(0.0, z[i] - h);
      const double d = std::abs(log_flat(f, zp) - log_flat(f, zm)) / (zp[i] - zm[i]);
      r.lipschitz_estimate = std::max(r.lipschitz_estimate, d);
      if (d > f.A * (1 + o.tolerance)) flag(r, "|d log f| = " + std::to_string(d) + " > A at " + pt(z, n));
    }
  };
  for (int p = 0; p < o.pairs; ++p) {
    Vec x{}, y{};
    for (int i = 0; i < n; ++i) x[i] = U(rng);
    for (int i = 0; i < n; ++i) y[i] = U(rng);
    const double lx = log_flat(f, x);
    const double ly = log_flat(f, y);
    sup_log = std::max({sup_log, lx, ly});
    derivative_check(x);
    const double lmin = std::min(lx, ly);
    for (int j = 0; j <= m; ++j) {
      const Vec z = lerp(x, y, double(j) / m, n);
      const double lz = log_flat(f, z);
      sup_log = std::max(sup_log, lz);
      const double ratio = std::exp(lz - lmin);
      r.growth_estimate = std::min(r.growth_estimate, ratio);
      if (ratio < f.eps * (1 - o.tolerance)) {
        flag(r, "segment condition fails: ratio " + std::to_string(ratio) + " < eps at " + pt(z, n));
      }
    }
  }
  // mass condition by composite Gauss-Legendre on a tensor grid
  const int sub = n <= 2 ? 32 : 8;
  const GaussRule rule = gauss_legendre(6);
  const int per_axis = sub * 6;
  std::vector<double> nodes, weights;
  for (int c = 0; c < sub; ++c) {
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      nodes.push_back((c + 0.5 + 0.5 * rule.nodes[k]) / sub);
      weights.push_back(0.5 * rule.weights[k] / sub);
    }
  }
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    Vec z{};
    for (int i = 0; i < n; ++i) z[i] = (corner >> i) & 1 ? 1.0 : 0.0;
    sup_log = std::max(sup_log, log_flat(f, z));
  }
  std::vector<double> logs(total), ws(total);
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rem = j;
    Vec z{};
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t k = rem % static_cast<std::size_t>(per_axis);
      rem /= static_cast<std::size_t>(per_axis);
      z[i] = nodes[k];
      w *= weights[k];
    }
    logs[j] = log_flat(f, z);
    ws[j] = w;
    sup_log = std::max(sup_log, logs[j]);
  }
  double integral = 0.0;
  for (std::size_t j = 0; j < total; ++j) integral += ws[j] * std::exp(logs[j] - sup_log);
  r.mass_ratio = integral;
  if (integral < f.eta * (1 - o.tolerance)) {
    flag(r, "mass condition fails: int f / sup f = " + std::to_string(integral) + " < eta");
  }
  return r;
}

ClassCheck check_class(const DensityFamily& family, const ClassCheckOptions& o) {
  if (const auto* f = std::get_if<ExpFalloff>(&family)) return check_falloff(*f, o);
  if (const auto* f = std::get_if<FlatClass>(&family)) return check_flat(*f, o);
  return ClassCheck{};
}

}  // namespace metrogap
