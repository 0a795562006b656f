#include "metrogap/weights.hpp"

#include <cmath>
#include <sstream>

#include "metrogap/error.hpp"

namespace metrogap {

WeightFunction WeightFunction::unit() { return WeightFunction(); }

WeightFunction WeightFunction::power_of_position(std::vector<WeightPiece> pieces, EdgeKey key, bool reflect) {
  WeightFunction w;
  w.kind_ = WeightKind::PowerOfPosition;
  w.pieces_ = std::move(pieces);
  w.key_ = key;
  w.reflect_ = reflect;
  return w;
}

WeightFunction WeightFunction::power_of_q(double theta) {
  if (!(theta > 0.0 && theta < 0.5)) throw InvalidArgument("weight exponent theta must lie in (0, 1/2)");
  WeightFunction w;
  w.kind_ = WeightKind::PowerOfQ;
  w.theta_ = theta;
  return w;
}

WeightFunction WeightFunction::valley_distance(double alpha) {
  WeightFunction w;
  w.kind_ = WeightKind::ValleyDistance;
  w.theta_ = alpha;
  return w;
}

std::vector<double> WeightFunction::evaluate(const GridChain& chain) const {
  const auto edges = chain.edges();
  std::vector<double> w(edges.size(), 1.0);
  switch (kind_) {
    case WeightKind::Unit:
      break;
    case WeightKind::PowerOfQ:
      for (std::size_t e = 0; e < w.size(); ++e) w[e] = std::exp(theta_ * std::log(edges[e].conductance));
      break;
    case WeightKind::ValleyDistance: {
      // F = (1 + A d)^alpha is stored as log F, so w = sqrt(max F)
      const auto lf = chain.target().log_weights();
      for (std::size_t e = 0; e < w.size(); ++e) {
        w[e] = std::exp(0.5 * std::max(lf[edges[e].lower], lf[edges[e].upper]));
      }
      break;
    }
    case WeightKind::PowerOfPosition: {
      if (chain.grid().dimension() != 1) throw InvalidArgument("position weights need a one-dimensional grid");
      const int lo = chain.grid().axis(0).lo;
      for (std::size_t e = 0; e < w.size(); ++e) {
        const int j = lo + static_cast<int>(edges[e].lower);
        int k = j;
        if (key_ == EdgeKey::Far) k = (j + 1 <= 0) ? j : j + 1;
        if (reflect_) k = -k;
        bool found = false;
        for (const auto& p : pieces_) {
          if (k >= p.lo && k <= p.hi) {
            w[e] = p.scale * std::pow(p.shift + std::abs(k), p.exponent);
            found = true;
            break;
          }
        }
        if (!found) throw InvalidArgument("weight schedule does not cover key " + std::to_string(k));
      }
      break;
    }
  }
  for (std::size_t e = 0; e < w.size(); ++e) {
    if (!(w[e] > 0.0) || !std::isfinite(w[e])) {
      throw InvalidArgument("weight of edge " + std::to_string(e) + " is not positive and finite");
    }
  }
  return w;
}

std::string WeightFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case WeightKind::Unit:
      os << "unit";
      break;
    case WeightKind::PowerOfQ:
      os << "Q^" << theta_;
      break;
    case WeightKind::ValleyDistance:
      os << "(1+A d)^(" << theta_ << "/2)";
      break;
    case WeightKind::PowerOfPosition:
      os << "position[" << (key_ == EdgeKey::Left ? "left" : "far") << (reflect_ ? ",reflected" : "") << "]";
      for (const auto& p : pieces_) {
        os << " k in [" << p.lo << "," << p.hi << "]: " << p.scale << "*(" << p.shift << "+|k|)^" << p.exponent << ";";
      }
      break;
  }
  return os.str();
}

double w_length(const GridChain& chain, const std::vector<std::size_t>& vertices, const std::vector<double>& w) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const std::size_t e = chain.edge_between(vertices[i], vertices[i + 1]);
    if (e == GridChain::npos) throw InvalidArgument("path step is not a chain edge");
    len += 1.0 / (w[e] * w[e]);
  }
  return len;
}

}  // namespace metrogap
