#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metrogap/families.hpp"
#include "metrogap/fit.hpp"
#include "metrogap/pathbound.hpp"
#include "metrogap/spectral.hpp"

namespace metrogap {

/// One family with a size grid. Parameter values are numbers or expressions
/// in N ("N", "2*N", "0.5*N"); OneDAsym2 uses `sizes` instead of `N`.
struct SweepGroup {
  std::string family;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<int> N;
  std::vector<std::pair<int, int>> sizes;
  std::optional<ScalingLaw> law;
};

struct SweepConfig {
  std::vector<SweepGroup> groups;
  unsigned threads = 1;
  SpectralOptions spectral;
  BoundOptions bound;
  bool mixing = false;
  std::size_t mixing_cap = 2500;
  FitTolerance tolerance;
};

/// Parses the JSON sweep configuration; schema violations throw InvalidArgument.
SweepConfig parse_sweep_config(const std::string& json_text);

struct StageTimes {
  double build = 0.0;
  double spectral = 0.0;
  double bound = 0.0;
  double upper = 0.0;
  double mixing = 0.0;
};

struct SweepRecord {
  std::string family;
  /// Parameters other than the size keys, "k=v;..." in declaration order.
  std::string params;
  int N = 0;
  int N_minus = 0;
  int N_plus = 0;
  std::size_t states = 0;
  double lambda = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string upper_label;
  std::string recipe;
  std::optional<double> T_TV;
  std::optional<double> T_inf;
  /// ok, violation, cap, error
  std::string status = "ok";
  std::string message;
  StageTimes seconds;
};

/// Resolves a group into concrete families, one per size.
std::vector<DensityFamily> expand_group(const SweepGroup& group);

/// Evaluates one family: exact gap, certified lower bound, best test-function
/// upper bound and, below the cap, mixing times. Never throws; failures are
/// reported in the record status.
SweepRecord evaluate_cell(const DensityFamily& family, const SweepConfig& config);

/// All cells of all groups, sorted by (family, params, N, N_minus, N_plus).
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

struct GroupFit {
  std::string family;
  std::string params;
  FitResult fit;
};

/// Exponent fits for the groups that declare a law.
std::vector<GroupFit> fit_groups(const SweepConfig& config, const std::vector<SweepRecord>& records);

/// Fixed-format CSV without timings.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
/// JSON with timings and fits.
void write_sweep_json(std::ostream& out, const std::vector<SweepRecord>& records, const std::vector<GroupFit>& fits);

/// Reads records back from the CSV written by write_sweep_csv.
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

}  // namespace metrogap
