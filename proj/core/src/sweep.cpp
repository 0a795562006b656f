#include "metrogap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "metrogap/error.hpp"
#include "metrogap/mixing.hpp"
#include "metrogap/recipe.hpp"

namespace metrogap {

namespace {

using ojson = nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_12g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// "N", "c*N" or a plain number
std::string resolve(const std::string& key, const std::string& text, int N) {
  if (text == "N") return std::to_string(N);
  const auto star = text.find('*');
  if (star != std::string::npos) {
    if (text.substr(star + 1) != "N") throw InvalidArgument("parameter " + key + ": expression must be c*N");
    const std::string c = text.substr(0, star);
    double v = 0.0;
    const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
    if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
      throw InvalidArgument("parameter " + key + ": bad coefficient '" + c + "'");
    }
    return format_number(v * N);
  }
  return text;
}

std::string join_params(const std::vector<std::pair<std::string, std::string>>& params) {
  std::string s;
  for (const auto& [k, v] : params) {
    if (!s.empty()) s += ';';
    s += k + '=' + v;
  }
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void sizes_of(const DensityFamily& family, SweepRecord& r) {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, OneDAsym2>) {
          r.N_minus = f.N_minus;
          r.N_plus = f.N_plus;
          r.N = std::max(f.N_minus, f.N_plus);
        } else {
          r.N = f.N;
        }
      },
      family);
}

bool is_size_key(const std::string& k) { return k == "N" || k == "N_minus" || k == "N_plus"; }

template <class T>
T required(const ojson& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidArgument(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(where + ": key '" + key + "' has the wrong type");
  }
}

void reject_unknown(const ojson& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      throw InvalidArgument(where + ": unknown key '" + k + "'");
    }
  }
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("sweep config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("sweep config must be a JSON object");
  reject_unknown(j,
                 {"groups", "threads", "solver", "dense_cap", "auto_dense_limit", "pair_cap", "mixing", "mixing_cap",
                  "tolerance"},
                 "config");
  SweepConfig c;
  if (j.contains("threads")) c.threads = required<unsigned>(j, "threads", "config");
  if (j.contains("solver")) c.spectral.mode = solver_mode_from_string(required<std::string>(j, "solver", "config"));
  if (j.contains("dense_cap")) c.spectral.dense_cap = required<std::size_t>(j, "dense_cap", "config");
  if (j.contains("auto_dense_limit")) c.spectral.auto_dense_limit = required<std::size_t>(j, "auto_dense_limit", "config");
  if (j.contains("pair_cap")) c.bound.pair_cap = required<std::uint64_t>(j, "pair_cap", "config");
  if (j.contains("mixing")) c.mixing = required<bool>(j, "mixing", "config");
  if (j.contains("mixing_cap")) c.mixing_cap = required<std::size_t>(j, "mixing_cap", "config");
  if (j.contains("tolerance")) {
    const auto& t = j.at("tolerance");
    reject_unknown(t, {"exponent", "ratio"}, "tolerance");
    if (t.contains("exponent")) c.tolerance.exponent = required<double>(t, "exponent", "tolerance");
    if (t.contains("ratio")) c.tolerance.ratio = required<double>(t, "ratio", "tolerance");
  }
  const auto groups = required<ojson>(j, "groups", "config");
  if (!groups.is_array() || groups.empty()) throw InvalidArgument("config: 'groups' must be a non-empty array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const std::string where = "group " + std::to_string(i);
    if (!g.is_object()) throw InvalidArgument(where + " must be an object");
    reject_unknown(g, {"family", "params", "N", "sizes", "law"}, where);
    SweepGroup sg;
    sg.family = required<std::string>(g, "family", where);
    if (g.contains("params")) {
      if (!g.at("params").is_object()) throw InvalidArgument(where + ": 'params' must be an object");
      for (const auto& [k, v] : g.at("params").items()) {
        if (is_size_key(k)) throw InvalidArgument(where + ": size key '" + k + "' belongs in N or sizes");
        if (v.is_number()) {
          sg.params.emplace_back(k, format_number(v.get<double>()));
        } else if (v.is_string()) {
          sg.params.emplace_back(k, v.get<std::string>());
        } else {
          throw InvalidArgument(where + ": parameter '" + k + "' must be a number or a string");
        }
      }
    }
    if (g.contains("N")) sg.N = required<std::vector<int>>(g, "N", where);
    if (g.contains("sizes")) {
      for (const auto& p : required<std::vector<std::vector<int>>>(g, "sizes", where)) {
        if (p.size() != 2) throw InvalidArgument(where + ": sizes are [N_minus, N_plus] pairs");
        sg.sizes.emplace_back(p[0], p[1]);
      }
    }
    if (sg.family == "OneDAsym2") {
      if (sg.sizes.empty() || !sg.N.empty()) throw InvalidArgument(where + ": OneDAsym2 takes 'sizes' and no 'N'");
    } else if (sg.N.empty() || !sg.sizes.empty()) {
      throw InvalidArgument(where + ": " + sg.family + " takes a non-empty 'N' list and no 'sizes'");
    }
    if (g.contains("law")) sg.law = parse_law(required<std::string>(g, "law", where));
    if (sg.family == "Valley") {
      for (const auto& [k, v] : sg.params) {
        if (k == "alpha" && std::strtod(v.c_str(), nullptr) == 0.0) {
          throw InvalidArgument(where + ": Valley with alpha = 0 is the uniform chain; use FlatClass or OneDAsym1");
        }
      }
    }
    // fail early on bad parameters
    expand_group(sg);
    c.groups.push_back(std::move(sg));
  }
  return c;
}

std::vector<DensityFamily> expand_group(const SweepGroup& group) {
  std::vector<DensityFamily> out;
  if (group.family == "OneDAsym2") {
    for (const auto& [nm, np] : group.sizes) {
      auto kv = group.params;
      for (auto& [k, v] : kv) v = resolve(k, v, std::max(nm, np));
      kv.emplace_back("N_minus", std::to_string(nm));
      kv.emplace_back("N_plus", std::to_string(np));
      out.push_back(make_family(group.family, kv));
    }
    return out;
  }
  for (int N : group.N) {
    auto kv = group.params;
    for (auto& [k, v] : kv) v = resolve(k, v, N);
    kv.emplace_back("N", std::to_string(N));
    out.push_back(make_family(group.family, kv));
  }
  return out;
}

SweepRecord evaluate_cell(const DensityFamily& family, const SweepConfig& config) {
  SweepRecord r;
  r.family = family_tag(family);
  std::vector<std::pair<std::string, std::string>> rest;
  for (auto& kv : family_params(family)) {
    if (!is_size_key(kv.first)) rest.push_back(kv);
  }
  r.params = join_params(rest);
  sizes_of(family, r);
  try {
    auto t0 = std::chrono::steady_clock::now();
    const GridChain chain = build_chain(family);
    r.states = chain.size();
    r.seconds.build = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    r.lambda = spectral_gap(chain, config.spectral).lambda;
    r.seconds.spectral = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const Recipe rec = recipe(family);
    BoundOptions bo = config.bound;
    bo.symmetry_reduction = rec.symmetry_reduction;
    r.recipe = rec.label;
    r.lower = compute_W(chain, rec.paths, rec.weight, bo).lower_bound;
    r.seconds.bound = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    r.upper = INFINITY;
    for (const auto& label : test_function_labels(family)) {
      double q = INFINITY;
      try {
        q = rayleigh_upper_bound(chain, test_function(family, label, chain.target()));
      } catch (const InvalidArgument&) {
        continue;
      }
      if (q < r.upper) {
        r.upper = q;
        r.upper_label = label;
      }
    }
    r.seconds.upper = seconds_since(t0);

    if (config.mixing && chain.size() <= config.mixing_cap) {
      t0 = std::chrono::steady_clock::now();
      MixingOptions mo;
      mo.lambda = r.lambda;
      mo.dense_cap = config.mixing_cap;
      const MixingReport m = mixing_times(chain, mo);
      r.T_TV = m.T_TV;
      r.T_inf = m.T_inf;
      r.seconds.mixing = seconds_since(t0);
      if (!m.sandwich_holds()) {
        r.status = "violation";
        r.message = "mixing sandwich fails";
      }
    }
    if (!(r.lower <= r.lambda && r.lambda <= r.upper)) {
      r.status = "violation";
      r.message = "lower " + format_12g(r.lower) + ", lambda " + format_12g(r.lambda) + ", upper " + format_12g(r.upper);
    }
  } catch (const CapExceeded& e) {
    r.status = "cap";
    r.message = e.what();
  } catch (const std::exception& e) {
    r.status = "error";
    r.message = e.what();
  }
  return r;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  struct Cell {
    DensityFamily family;
    std::string params;
  };
  std::vector<Cell> cells;
  for (const auto& g : config.groups) {
    for (auto& f : expand_group(g)) cells.push_back({std::move(f), join_params(g.params)});
  }
  std::vector<SweepRecord> records(cells.size());
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(cells.size(), 1)));
  SweepConfig inner = config;
  if (threads > 1) inner.bound.threads = 1;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      records[i] = evaluate_cell(cells[i].family, inner);
      records[i].params = cells[i].params;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return std::tie(a.family, a.params, a.N, a.N_minus, a.N_plus) < std::tie(b.family, b.params, b.N, b.N_minus, b.N_plus);
  });
  return records;
}

std::vector<GroupFit> fit_groups(const SweepConfig& config, const std::vector<SweepRecord>& records) {
  std::vector<GroupFit> out;
  for (const auto& g : config.groups) {
    if (!g.law) continue;
    GroupFit gf;
    gf.family = g.family;
    gf.params = join_params(g.params);
    std::vector<double> N, lambda;
    for (const auto& r : records) {
      if (r.family != gf.family || r.params != gf.params || r.status == "error" || r.status == "cap") continue;
      N.push_back(r.N);
      lambda.push_back(r.lambda);
    }
    gf.fit = fit_exponent(N, lambda, *g.law, config.tolerance);
    out.push_back(std::move(gf));
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "family,params,N,N_minus,N_plus,states,lambda,lower,upper,upper_label,recipe,T_TV,T_inf,status\n";
  for (const auto& r : records) {
    out << r.family << ',' << r.params << ',' << r.N << ',' << r.N_minus << ',' << r.N_plus << ',' << r.states << ','
        << format_12g(r.lambda) << ',' << format_12g(r.lower) << ',' << format_12g(r.upper) << ',' << r.upper_label
        << ',' << r.recipe << ',' << (r.T_TV ? format_12g(*r.T_TV) : "") << ','
        << (r.T_inf ? format_12g(*r.T_inf) : "") << ',' << r.status << '\n';
  }
}

void write_sweep_json(std::ostream& out, const std::vector<SweepRecord>& records, const std::vector<GroupFit>& fits) {
  ojson j;
  j["records"] = ojson::array();
  for (const auto& r : records) {
    ojson e;
    e["family"] = r.family;
    e["params"] = r.params;
    e["N"] = r.N;
    e["N_minus"] = r.N_minus;
    e["N_plus"] = r.N_plus;
    e["states"] = r.states;
    e["lambda"] = r.lambda;
    e["lower"] = r.lower;
    e["upper"] = std::isfinite(r.upper) ? ojson(r.upper) : ojson(nullptr);
    e["upper_label"] = r.upper_label;
    e["recipe"] = r.recipe;
    e["T_TV"] = r.T_TV ? ojson(*r.T_TV) : ojson(nullptr);
    e["T_inf"] = r.T_inf ? ojson(*r.T_inf) : ojson(nullptr);
    e["status"] = r.status;
    e["message"] = r.message;
    e["seconds"] = {{"build", r.seconds.build},
                    {"spectral", r.seconds.spectral},
                    {"bound", r.seconds.bound},
                    {"upper", r.seconds.upper},
                    {"mixing", r.seconds.mixing}};
    j["records"].push_back(std::move(e));
  }
  j["fits"] = ojson::array();
  for (const auto& f : fits) {
    j["fits"].push_back({{"family", f.family},
                         {"params", f.params},
                         {"law", to_string(f.fit.law)},
                         {"s", f.fit.s},
                         {"residual", f.fit.residual},
                         {"ratio", f.fit.ratio},
                         {"model_s", f.fit.model_s},
                         {"model_r", f.fit.model_r},
                         {"model_residual", f.fit.model_residual},
                         {"pass", f.fit.pass}});
  }
  out << j.dump(2) << '\n';
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty sweep CSV");
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 14) throw InvalidArgument("sweep CSV row has " + std::to_string(f.size()) + " fields, expected 14");
    SweepRecord r;
    r.family = f[0];
    r.params = f[1];
    r.N = std::stoi(f[2]);
    r.N_minus = std::stoi(f[3]);
    r.N_plus = std::stoi(f[4]);
    r.states = std::stoull(f[5]);
    r.lambda = std::stod(f[6]);
    r.lower = std::stod(f[7]);
    r.upper = std::stod(f[8]);
    r.upper_label = f[9];
    r.recipe = f[10];
    if (!f[11].empty()) r.T_TV = std::stod(f[11]);
    if (!f[12].empty()) r.T_inf = std::stod(f[12]);
    r.status = f[13];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace metrogap
