#include "metrogap/serialization.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "metrogap/error.hpp"

namespace metrogap {

namespace {

using ojson = nlohmann::ordered_json;

ojson finite_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson point_json(const Grid& g, std::size_t x) {
  const Point p = g.point(x);
  ojson a = ojson::array();
  for (int i = 0; i < g.dimension(); ++i) a.push_back(p[static_cast<std::size_t>(i)]);
  return a;
}

}  // namespace

DensityFamily family_from_json(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("family JSON does not parse: ") + e.what());
  }
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw InvalidArgument("family JSON needs a string 'family'");
  }
  std::vector<std::pair<std::string, std::string>> kv;
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) {
      if (v.is_number()) {
        kv.emplace_back(k, v.dump());
      } else if (v.is_string()) {
        kv.emplace_back(k, v.get<std::string>());
      } else {
        throw InvalidArgument("family parameter '" + k + "' must be a number or a string");
      }
    }
  }
  for (const auto& [k, v] : j.items()) {
    if (k != "family" && k != "params") throw InvalidArgument("family JSON: unknown key '" + k + "'");
  }
  return make_family(j.at("family").get<std::string>(), kv);
}

std::string family_to_json(const DensityFamily& family) {
  ojson j;
  j["family"] = family_tag(family);
  j["params"] = ojson::object();
  for (const auto& [k, v] : family_params(family)) j["params"][k] = v;
  return j.dump();
}

void write_chain_json(std::ostream& out, const DensityFamily& family, const GridChain& chain) {
  const Grid& g = chain.grid();
  ojson j;
  j["family"] = family_tag(family);
  j["params"] = ojson::object();
  for (const auto& [k, v] : family_params(family)) j["params"][k] = v;
  j["grid"] = ojson::array();
  for (const auto& a : g.axes()) j["grid"].push_back({{"lo", a.lo}, {"hi", a.hi}});
  j["states"] = chain.size();
  j["log_f"] = std::vector<double>(chain.target().log_weights().begin(), chain.target().log_weights().end());
  j["pi"] = std::vector<double>(chain.pi().begin(), chain.pi().end());
  j["holding"] = std::vector<double>(chain.holding().begin(), chain.holding().end());
  j["edges"] = ojson::array();
  for (const auto& e : chain.edges()) {
    j["edges"].push_back({{"lower", e.lower}, {"upper", e.upper}, {"axis", e.axis}, {"Q", e.conductance}});
  }
  out << j.dump(1) << '\n';
}

void write_spectral_json(std::ostream& out, const SpectralReport& r) {
  ojson j;
  j["lambda"] = r.lambda;
  j["beta1"] = r.beta1;
  j["beta_min"] = r.beta_min;
  j["beta2"] = r.beta2 ? ojson(*r.beta2) : ojson(nullptr);
  j["solver"] = to_string(r.solver);
  j["residual"] = r.residual;
  j["connected"] = r.connected;
  out << j.dump(2) << '\n';
}

void write_bound_json(std::ostream& out, const GridChain& chain, const BoundReport& r) {
  ojson j;
  j["W"] = r.W;
  j["lower_bound"] = r.lower_bound;
  j["mode"] = to_string(r.mode);
  j["rule"] = to_string(r.rule);
  j["weight"] = r.weight;
  j["symmetry_reduction"] = r.symmetry_reduction;
  j["pairs"] = r.pairs;
  if (!r.edge_W.empty()) {
    const auto& e = chain.edges()[r.argmax_edge];
    j["argmax_edge"] = {{"id", r.argmax_edge},
                        {"axis", e.axis},
                        {"lower", point_json(chain.grid(), e.lower)},
                        {"upper", point_json(chain.grid(), e.upper)}};
  }
  j["edge_W"] = {{"min", r.summary.min},
                 {"median", r.summary.median},
                 {"mean", r.summary.mean},
                 {"max", r.summary.max},
                 {"decades", r.summary.decades}};
  out << j.dump(2) << '\n';
}

void write_mixing_json(std::ostream& out, const MixingReport& r) {
  ojson j;
  j["T_TV"] = r.T_TV;
  j["T_inf"] = r.T_inf;
  j["relaxation"] = r.relaxation;
  j["upper"] = r.upper;
  j["lambda"] = r.lambda;
  j["worst_start_TV"] = r.worst_start_TV;
  j["worst_start_inf"] = r.worst_start_inf;
  j["resolution"] = r.resolution;
  j["sandwich"] = r.sandwich_holds();
  j["curve"] = ojson::array();
  for (const auto& p : r.curve) {
    j["curve"].push_back({{"t", p.t}, {"tv_worst", finite_or_null(p.tv_worst)}, {"sup_worst", finite_or_null(p.sup_worst)}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace metrogap
