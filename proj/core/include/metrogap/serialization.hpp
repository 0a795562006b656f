#pragma once

#include <iosfwd>
#include <string>

#include "metrogap/chain.hpp"
#include "metrogap/families.hpp"
#include "metrogap/mixing.hpp"
#include "metrogap/pathbound.hpp"
#include "metrogap/spectral.hpp"

namespace metrogap {

/// {"family": tag, "params": {key: number or string}}.
DensityFamily family_from_json(const std::string& json_text);
std::string family_to_json(const DensityFamily& family);

/// Grid, log-weights, pi, holding and every edge with its conductance.
void write_chain_json(std::ostream& out, const DensityFamily& family, const GridChain& chain);

void write_spectral_json(std::ostream& out, const SpectralReport& report);
/// Per-edge values are omitted; use write_edge_csv for those.
void write_bound_json(std::ostream& out, const GridChain& chain, const BoundReport& report);
void write_mixing_json(std::ostream& out, const MixingReport& report);

}  // namespace metrogap
