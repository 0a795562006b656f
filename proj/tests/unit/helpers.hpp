#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <metrogap/chain.hpp>
#include <metrogap/paths.hpp>
#include <metrogap/weights.hpp>

namespace testing {

inline metrogap::GridChain random_chain(const metrogap::Grid& g, std::uint64_t seed, double spread = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> lf(g.size());
  for (auto& v : lf) v = u(rng);
  return metrogap::build_metropolis_log(g, lf);
}

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// 1/2 sum_{x,y} (u(x)-u(y))(v(x)-v(y)) pi(x) K(x,y) over all ordered pairs
inline double brute_dirichlet(const metrogap::GridChain& c, const std::vector<double>& u, const std::vector<double>& v) {
  long double s = 0.0L;
  for (std::size_t x = 0; x < c.size(); ++x) {
    for (std::size_t y = 0; y < c.size(); ++y) {
      s += static_cast<long double>((u[x] - u[y]) * (v[x] - v[y])) * c.pi()[x] * c.transition(x, y);
    }
  }
  return static_cast<double>(s / 2.0L);
}

// W(e) by walking every path vertex by vertex; pairs mode sums ordered pairs,
// symmetric reduction keeps pi(x) <= pi(y) and doubles the maximum.
inline double brute_W(const metrogap::GridChain& c, const metrogap::PathSystem& p, const metrogap::WeightFunction& wf,
                      bool symmetric = false) {
  const auto w = wf.evaluate(c);
  std::vector<long double> load(c.edges().size(), 0.0L);
  auto add = [&](std::size_t x, std::size_t y, long double mass) {
    const auto v = p.vertices(x, y);
    long double len = 0.0L;
    std::vector<std::size_t> es;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const auto e = c.edge_between(v[i], v[i + 1]);
      es.push_back(e);
      len += 1.0L / (static_cast<long double>(w[e]) * w[e]);
    }
    for (auto e : es) load[e] += len * mass;
  };
  if (p.mode() == metrogap::TargetMode::ToPoint) {
    for (std::size_t x = 0; x < c.size(); ++x) {
      if (x != p.target()) add(x, p.target(), c.pi()[x]);
    }
  } else {
    for (std::size_t x = 0; x < c.size(); ++x) {
      for (std::size_t y = 0; y < c.size(); ++y) {
        if (x == y) continue;
        if (symmetric && c.pi()[x] > c.pi()[y] * (1.0 + 1e-12)) continue;
        add(x, y, static_cast<long double>(c.pi()[x]) * c.pi()[y]);
      }
    }
  }
  double W = 0.0;
  for (std::size_t e = 0; e < load.size(); ++e) {
    const double we = static_cast<double>(load[e] * w[e] * w[e] / c.edges()[e].conductance);
    W = std::max(W, we);
  }
  return symmetric ? 2.0 * W : W;
}

}  // namespace testing
