#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <metrogap/class_check.hpp>
#include <metrogap/error.hpp>
#include <metrogap/families.hpp>
#include <metrogap/fit.hpp>
#include <metrogap/mixing.hpp>
#include <metrogap/pathbound.hpp>
#include <metrogap/recipe.hpp>
#include <metrogap/serialization.hpp>
#include <metrogap/spectral.hpp>
#include <metrogap/sweep.hpp>

using namespace metrogap;

namespace {

struct Common {
  std::string family;
  std::vector<std::string> params;
  std::optional<int> N;
  std::string chain;
  std::string out;
  unsigned threads = 0;
  std::size_t dense_cap = 20000;
  std::uint64_t pair_cap = BoundOptions{}.pair_cap;
  std::uint64_t seed = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DensityFamily resolve_family(const Common& c) {
  if (!c.chain.empty()) {
    if (!c.family.empty()) throw InvalidArgument("give either --chain or --family");
    return family_from_json(read_file(c.chain));
  }
  if (c.family.empty()) throw InvalidArgument("--family or --chain is required");
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& p : c.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--param expects key=value, got '" + p + "'");
    kv.emplace_back(p.substr(0, eq), p.substr(eq + 1));
  }
  if (c.N) kv.emplace_back("N", std::to_string(*c.N));
  return make_family(c.family, kv);
}

// Writes to --out when given, stdout otherwise.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write(out);
}

void add_common(CLI::App* sub, Common& c, bool family = true) {
  if (family) {
    sub->add_option("--family", c.family, "Family tag: OneDAsym1, OneDAsym2, ExpLinear, ExpFalloff, FlatClass, Valley");
    sub->add_option("--param", c.params, "Family parameter key=value (repeatable)");
    sub->add_option("--N", c.N, "Size parameter N");
    sub->add_option("--chain", c.chain, "Family JSON file {\"family\":..., \"params\":{...}}");
  }
  sub->add_option("--out", c.out, "Output path (default stdout)");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->envname("METROGAP_THREADS");
  sub->add_option("--dense-cap", c.dense_cap, "Largest state count for dense solvers")->envname("METROGAP_DENSE_CAP");
  sub->add_option("--pair-cap", c.pair_cap, "Largest number of path pairs enumerated")->envname("METROGAP_PAIR_CAP");
  sub->add_option("--seed", c.seed, "Seed for sampled class-membership checks")->envname("METROGAP_SEED");
}

SpectralOptions spectral_options(const Common& c, const std::string& solver) {
  SpectralOptions o;
  o.mode = solver_mode_from_string(solver);
  o.dense_cap = c.dense_cap;
  return o;
}

BoundOptions bound_options(const Common& c) {
  BoundOptions o;
  o.threads = c.threads;
  o.pair_cap = c.pair_cap;
  return o;
}

double best_upper_bound(const DensityFamily& family, const GridChain& chain, std::string& label) {
  double best = INFINITY;
  for (const auto& l : test_function_labels(family)) {
    try {
      const double q = rayleigh_upper_bound(chain, test_function(family, l, chain.target()));
      if (q < best) {
        best = q;
        label = l;
      }
    } catch (const InvalidArgument&) {
    }
  }
  return best;
}

int run_check(const Common& c, const std::string& config_path) {
  if (!config_path.empty()) {
    SweepConfig cfg = parse_sweep_config(read_file(config_path));
    if (c.threads) cfg.threads = c.threads;
    const auto records = run_sweep(cfg);
    int bad = 0;
    for (const auto& r : records) {
      if (r.status != "ok") {
        ++bad;
        std::cerr << r.family << ' ' << r.params << " N=" << r.N << ": " << r.status << ' ' << r.message << '\n';
      }
    }
    std::cout << records.size() - static_cast<std::size_t>(bad) << '/' << records.size() << " cells certified\n";
    return bad ? 1 : 0;
  }
  const DensityFamily family = resolve_family(c);
  const GridChain chain = build_chain(family);
  bool ok = true;
  auto line = [&](const std::string& what, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << what << ": " << detail << '\n';
    ok = ok && pass;
  };
  const ChainAudit audit = audit_chain(chain);
  std::ostringstream d;
  d << "row " << audit.row_sum_error << ", reversibility " << audit.reversibility_error << ", Q identity "
    << audit.metropolis_error;
  line("chain identities", audit.ok(), d.str());

  ClassCheckOptions co;
  co.seed = c.seed;
  const ClassCheck cc = check_class(family, co);
  line("class membership", cc.ok, cc.ok ? "sampled conditions hold" : cc.violations.front());

  const Recipe rec = recipe(family);
  const PathAudit pa = audit_paths(chain, rec.paths);
  line("paths", pa.invalid == 0,
       std::to_string(pa.paths) + " paths, " + std::to_string(pa.invalid) + " invalid" +
           (pa.first_problem.empty() ? "" : " (" + pa.first_problem + ")"));

  const SpectralReport sp = spectral_gap(chain, spectral_options(c, "auto"));
  BoundOptions bo = bound_options(c);
  bo.symmetry_reduction = rec.symmetry_reduction;
  const BoundReport br = compute_W(chain, rec.paths, rec.weight, bo);
  std::string label;
  const double upper = best_upper_bound(family, chain, label);
  std::ostringstream s;
  s.precision(12);
  s << br.lower_bound << " <= " << sp.lambda << " <= " << upper << " (" << label << ")";
  line("sandwich", br.lower_bound <= sp.lambda && sp.lambda <= upper, s.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral gaps, path bounds and mixing times of lattice Metropolis chains"};
  app.require_subcommand(1);
  Common c;

  auto* build = app.add_subcommand("build", "Write the chain as JSON");
  add_common(build, c);

  std::string solver = "auto";
  bool beta2 = false;
  auto* gap = app.add_subcommand("gap", "Exact spectral gap");
  add_common(gap, c);
  gap->add_option("--solver", solver, "dense, iterative or auto")->envname("METROGAP_SOLVER");
  gap->add_flag("--beta2", beta2, "Also report beta_2 (dense solver)");

  std::string edge_csv;
  bool verify = false;
  auto* bound = app.add_subcommand("bound", "Certified lower bound from weighted paths");
  add_common(bound, c);
  bound->add_option("--edge-csv", edge_csv, "Write per-edge W(e) as CSV");
  bound->add_flag("--verify", verify, "Also compute the gap and fail if the bound exceeds it");

  std::string curve_csv;
  auto* mix = app.add_subcommand("mix", "Mixing times and distance curves");
  add_common(mix, c);
  mix->add_option("--curve-csv", curve_csv, "Write t,tv_worst,sup_worst as CSV");

  std::string config_path, json_path;
  auto* sweep = app.add_subcommand("sweep", "Run a sweep configuration");
  add_common(sweep, c, false);
  sweep->add_option("--config", config_path, "Sweep configuration (JSON)")->required()->envname("METROGAP_CONFIG");
  sweep->add_option("--json", json_path, "Also write records with timings and fits as JSON");

  std::string in_csv, law_text, match_family, match_params;
  FitTolerance tol;
  auto* fit = app.add_subcommand("fit", "Fit a scaling exponent to sweep records");
  fit->add_option("--in", in_csv, "Sweep CSV")->required();
  fit->add_option("--law", law_text, "power:S or powerlog:S:R")->required();
  fit->add_option("--family", match_family, "Only records of this family");
  fit->add_option("--params", match_params, "Only records with exactly this params field");
  fit->add_option("--tolerance", tol.exponent, "Accepted exponent deviation");
  fit->add_option("--ratio", tol.ratio, "Accepted max/min of the compensated gap");

  auto* check = app.add_subcommand("check", "Sandwich and invariant audit");
  add_common(check, c);
  check->add_option("--config", config_path, "Check every cell of a sweep configuration instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      const auto family = resolve_family(c);
      const auto chain = build_chain(family);
      emit(c.out, [&](std::ostream& o) { write_chain_json(o, family, chain); });
    } else if (gap->parsed()) {
      const auto chain = build_chain(resolve_family(c));
      auto o = spectral_options(c, solver);
      o.compute_beta2 = beta2;
      const auto r = spectral_gap(chain, o);
      emit(c.out, [&](std::ostream& os) { write_spectral_json(os, r); });
    } else if (bound->parsed()) {
      const auto family = resolve_family(c);
      const auto chain = build_chain(family);
      const Recipe rec = recipe(family);
      BoundOptions bo = bound_options(c);
      bo.symmetry_reduction = rec.symmetry_reduction;
      const auto r = compute_W(chain, rec.paths, rec.weight, bo);
      emit(c.out, [&](std::ostream& os) { write_bound_json(os, chain, r); });
      if (!edge_csv.empty()) emit(edge_csv, [&](std::ostream& os) { write_edge_csv(os, chain, r); });
      if (verify) {
        const double lambda = spectral_gap(chain, spectral_options(c, "auto")).lambda;
        if (!(r.lower_bound <= lambda)) {
          std::cerr << "certificate violated: bound " << r.lower_bound << " > gap " << lambda << '\n';
          return 1;
        }
      }
    } else if (mix->parsed()) {
      const auto chain = build_chain(resolve_family(c));
      MixingOptions mo;
      mo.dense_cap = c.dense_cap;
      const auto r = mixing_times(chain, mo);
      emit(c.out, [&](std::ostream& os) { write_mixing_json(os, r); });
      if (!curve_csv.empty()) emit(curve_csv, [&](std::ostream& os) { write_distance_csv(os, r.curve); });
      if (!r.sandwich_holds()) {
        std::cerr << "mixing sandwich violated\n";
        return 1;
      }
    } else if (sweep->parsed()) {
      SweepConfig cfg = parse_sweep_config(read_file(config_path));
      if (c.threads) cfg.threads = c.threads;
      if (sweep->count("--dense-cap")) cfg.spectral.dense_cap = c.dense_cap;
      if (sweep->count("--pair-cap")) cfg.bound.pair_cap = c.pair_cap;
      const auto records = run_sweep(cfg);
      emit(c.out, [&](std::ostream& os) { write_sweep_csv(os, records); });
      std::vector<GroupFit> fits;
      try {
        fits = fit_groups(cfg, records);
      } catch (const InvalidArgument& e) {
        std::cerr << "fit skipped: " << e.what() << '\n';
      }
      if (!json_path.empty()) emit(json_path, [&](std::ostream& os) { write_sweep_json(os, records, fits); });
      int bad = 0;
      for (const auto& r : records) bad += r.status != "ok";
      for (const auto& f : fits) bad += !f.fit.pass;
      return bad ? 1 : 0;
    } else if (fit->parsed()) {
      std::ifstream in(in_csv);
      if (!in) throw InvalidArgument("cannot open " + in_csv);
      std::vector<double> N, lambda;
      for (const auto& r : read_sweep_csv(in)) {
        if (!match_family.empty() && r.family != match_family) continue;
        if (!match_params.empty() && r.params != match_params) continue;
        if (r.status != "ok" && r.status != "violation") continue;
        N.push_back(r.N);
        lambda.push_back(r.lambda);
      }
      const auto law = parse_law(law_text);
      const auto f = fit_exponent(N, lambda, law, tol);
      std::cout.precision(6);
      std::cout << "law " << to_string(law) << ": s = " << f.s << " (residual " << f.residual << "), ratio "
                << f.ratio << ", best model N^" << f.model_s << " (log N)^" << f.model_r << " -> "
                << (f.pass ? "pass" : "fail") << '\n';
      return f.pass ? 0 : 1;
    } else if (check->parsed()) {
      return run_check(c, config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
