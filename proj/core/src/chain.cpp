#include "metrogap/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metrogap/error.hpp"
#include "numeric.hpp"

namespace metrogap {

StateFunction::StateFunction(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("state function value at state " + std::to_string(i) + " is not finite");
    }
  }
}

StateFunction StateFunction::constant(std::size_t size, double value) {
  return StateFunction(std::vector<double>(size, value));
}

TargetMeasure TargetMeasure::from_log_weights(std::vector<double> log_weights) {
  if (log_weights.empty()) throw InvalidArgument("target measure on an empty state set");
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (!std::isfinite(log_weights[i])) throw NonPositiveTarget(i, std::exp(log_weights[i]));
  }
  TargetMeasure t;
  t.log_f_ = std::move(log_weights);
  t.log_norm_ = detail::log_sum_exp(t.log_f_);
  const std::size_t n = t.log_f_.size();
  t.log_pi_.resize(n);
  t.pi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.log_pi_[i] = t.log_f_[i] - t.log_norm_;
    t.pi_[i] = std::exp(t.log_pi_[i]);
  }
  t.argmin_ = static_cast<std::size_t>(std::min_element(t.log_f_.begin(), t.log_f_.end()) - t.log_f_.begin());
  t.argmax_ = static_cast<std::size_t>(std::max_element(t.log_f_.begin(), t.log_f_.end()) - t.log_f_.begin());
  if (!(t.pi_[t.argmin_] > 0.0)) {
    throw InvalidArgument("minimum stationary probability underflows double precision");
  }
  return t;
}

TargetMeasure TargetMeasure::from_weights(std::span<const double> weights) {
  std::vector<double> lf(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw NonPositiveTarget(i, weights[i]);
    lf[i] = std::log(weights[i]);
  }
  return from_log_weights(std::move(lf));
}

GridChain::GridChain(Grid grid, TargetMeasure target) : grid_(std::move(grid)), target_(std::move(target)) {
  if (grid_.empty()) throw InvalidArgument("empty grid");
  if (target_.size() != grid_.size()) {
    throw InvalidArgument("target has " + std::to_string(target_.size()) + " values but grid has " +
                          std::to_string(grid_.size()) + " states");
  }
  const int n = grid_.dimension();
  edge_index_.assign(static_cast<std::size_t>(n), std::vector<std::size_t>(grid_.size(), npos));
  for (std::size_t x = 0; x < grid_.size(); ++x) {
    for (int a = 0; a < n; ++a) {
      if (auto y = grid_.neighbor(x, a, +1)) {
        edge_index_[static_cast<std::size_t>(a)][x] = edges_.size();
        edges_.push_back(ChainEdge{x, *y, a, 0.0, 0.0});
      }
    }
  }
}

void GridChain::finish(std::vector<double> conductances) {
  const auto lpi = target_.log_probabilities();
  const auto pi = target_.probabilities();
  const std::size_t ns = grid_.size();
  std::vector<double> out(ns, 0.0);
  std::vector<std::size_t> degree(ns, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    ChainEdge& ed = edges_[e];
    const double q = conductances[e];
    ed.conductance = q;
    ed.symmetric_weight = q > 0.0 ? std::exp(std::log(q) - 0.5 * (lpi[ed.lower] + lpi[ed.upper])) : 0.0;
    out[ed.lower] += q / pi[ed.lower];
    out[ed.upper] += q / pi[ed.upper];
    ++degree[ed.lower];
    ++degree[ed.upper];
  }
  holding_.resize(ns);
  for (std::size_t x = 0; x < ns; ++x) {
    if (out[x] > 1.0 + 1e-12) {
      throw InvalidArgument("conductances give row " + std::to_string(x) + " total off-diagonal mass " +
                            std::to_string(out[x]) + " > 1");
    }
    holding_[x] = std::max(0.0, 1.0 - out[x]);
  }
  offsets_.assign(ns + 1, 0);
  for (std::size_t x = 0; x < ns; ++x) offsets_[x + 1] = offsets_[x] + degree[x];
  incidence_.resize(offsets_[ns]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    incidence_[fill[edges_[e].lower]++] = Incidence{edges_[e].upper, e};
    incidence_[fill[edges_[e].upper]++] = Incidence{edges_[e].lower, e};
  }
}

GridChain GridChain::metropolis(Grid grid, TargetMeasure target) {
  GridChain c(std::move(grid), std::move(target));
  const double inv2n = 1.0 / (2.0 * c.grid_.dimension());
  const auto lpi = c.target_.log_probabilities();
  std::vector<double> q(c.edges_.size());
  for (std::size_t e = 0; e < q.size(); ++e) {
    const auto& ed = c.edges_[e];
    q[e] = inv2n * std::exp(std::min(lpi[ed.lower], lpi[ed.upper]));
  }
  c.finish(std::move(q));
  // exp(-|dlogF|/2)/(2n) directly, without going through the rounded conductance
  const auto lf = c.target_.log_weights();
  for (auto& ed : c.edges_) {
    ed.symmetric_weight = inv2n * std::exp(-0.5 * std::abs(lf[ed.lower] - lf[ed.upper]));
  }
  return c;
}

GridChain GridChain::from_conductances(Grid grid, TargetMeasure target, std::span<const double> conductances) {
  GridChain c(std::move(grid), std::move(target));
  if (conductances.size() != c.edges_.size()) {
    throw InvalidArgument("expected " + std::to_string(c.edges_.size()) + " conductances, got " +
                          std::to_string(conductances.size()));
  }
  for (std::size_t e = 0; e < conductances.size(); ++e) {
    if (!(conductances[e] >= 0.0) || !std::isfinite(conductances[e])) {
      throw InvalidArgument("conductance of edge " + std::to_string(e) + " is negative or not finite");
    }
  }
  c.finish(std::vector<double>(conductances.begin(), conductances.end()));
  return c;
}

std::size_t GridChain::edge_between(std::size_t x, std::size_t y) const {
  for (const auto& inc : incident(x)) {
    if (inc.neighbor == y) return inc.edge;
  }
  return npos;
}

double GridChain::transition(std::size_t x, std::size_t y) const {
  if (x == y) return holding_[x];
  const std::size_t e = edge_between(x, y);
  if (e == npos) return 0.0;
  if (edges_[e].conductance == 0.0) return 0.0;
  return std::exp(std::log(edges_[e].conductance) - target_.log_probabilities()[x]);
}

GridChain build_metropolis(const Grid& grid, std::span<const double> f) {
  if (grid.empty()) throw InvalidArgument("empty grid");
  if (f.size() != grid.size()) {
    throw InvalidArgument("target has " + std::to_string(f.size()) + " values but grid has " +
                          std::to_string(grid.size()) + " states");
  }
  return GridChain::metropolis(grid, TargetMeasure::from_weights(f));
}

GridChain build_metropolis_log(const Grid& grid, std::vector<double> log_f) {
  if (grid.empty()) throw InvalidArgument("empty grid");
  return GridChain::metropolis(grid, TargetMeasure::from_log_weights(std::move(log_f)));
}

namespace {
void check_size(const GridChain& chain, const StateFunction& u) {
  if (u.size() != chain.size()) {
    throw InvalidArgument("state function has " + std::to_string(u.size()) + " values but chain has " +
                          std::to_string(chain.size()) + " states");
  }
}
}  // namespace

double expectation(const GridChain& chain, const StateFunction& u) {
  check_size(chain, u);
  const auto pi = chain.pi();
  detail::Accumulator acc;
  for (std::size_t x = 0; x < u.size(); ++x) acc += pi[x] * u[x];
  return acc.value();
}

double dirichlet_form(const GridChain& chain, const StateFunction& u, const StateFunction& v) {
  check_size(chain, u);
  check_size(chain, v);
  detail::Accumulator acc;
  for (const auto& e : chain.edges()) {
    acc += e.conductance * (u[e.upper] - u[e.lower]) * (v[e.upper] - v[e.lower]);
  }
  return acc.value();
}

double variance(const GridChain& chain, const StateFunction& u) {
  const double m = expectation(chain, u);
  const auto pi = chain.pi();
  detail::Accumulator acc;
  for (std::size_t x = 0; x < u.size(); ++x) {
    const double d = u[x] - m;
    acc += pi[x] * d * d;
  }
  return acc.value();
}

ChainAudit audit_chain(const GridChain& chain) {
  ChainAudit a;
  const auto pi = chain.pi();
  const double inv2n = 1.0 / (2.0 * chain.grid().dimension());
  for (std::size_t x = 0; x < chain.size(); ++x) {
    detail::Accumulator row;
    row += chain.transition(x, x);
    for (const auto& inc : chain.incident(x)) row += chain.transition(x, inc.neighbor);
    a.row_sum_error = std::max(a.row_sum_error, std::abs(row.value() - 1.0));
  }
  for (const auto& e : chain.edges()) {
    const double q = e.conductance;
    if (!(q > 0.0)) continue;
    const double fwd = pi[e.lower] * chain.transition(e.lower, e.upper);
    const double bwd = pi[e.upper] * chain.transition(e.upper, e.lower);
    a.reversibility_error = std::max(a.reversibility_error, std::abs(fwd - bwd) / q);
    const double metro = inv2n * std::min(pi[e.lower], pi[e.upper]);
    a.metropolis_error = std::max(a.metropolis_error, std::abs(q - metro) / q);
  }
  return a;
}

}  // namespace metrogap
