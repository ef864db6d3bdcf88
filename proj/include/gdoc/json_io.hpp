#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdoc/gibbs.hpp"
#include "gdoc/model.hpp"

namespace gdoc {

using Json = nlohmann::ordered_json;

/// A site is a coordinate array; in D = 1 a bare integer is accepted.
Site site_from_json(const Json& j, int D);
Json site_to_json(const Site& x);
/// Regions are arrays of sites, e.g. [[0,0],[0,1]].
Region region_from_json(const Json& j, int D);
Json region_to_json(const Region& r);
/// Nested [re, im] pairs, row-major.
ComplexMatrix matrix_from_json(const Json& j);
Json matrix_to_json(const ComplexMatrix& M);

/// {"D","R","q","lattice","model":"xxz"|"custom",...}. For "xxz": "lambda", "seed", "J12", "J3"
/// as [[x, y, re, im], ...] or a number for uniform nearest-neighbour couplings. For "custom":
/// "onsite": [{"site", "matrix"}], "interactions": [{"center", "support", "matrix"}].
/// An optional "a" is the claimed form-bound constant. `default_seed` is used when "seed" is absent.
/// Parse errors raise ConfigError; certification failures propagate as CertificationError.
HamiltonianSpec spec_from_json(const Json& j, std::uint64_t default_seed = 0);
/// Custom-model form with explicit matrices.
Json spec_to_json(const HamiltonianSpec& spec);

/// Pauli string placed at an anchor: {"anchor": site, "string": [{"offset": [...], "pauli": k}]}
/// or {"anchor": site, "pauli": k} for a single site.
struct ObservableSpec {
  PauliTemplate pauli;
  Site anchor;
};
ObservableSpec observable_from_json(const Json& j, int D);

struct ExperimentConfig {
  std::string command;
  Json model;
  std::vector<double> betas;
  std::map<std::string, ObservableSpec> observables;
  std::vector<int> distances;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
  Json raw;

  /// Tolerance by name, falling back to `fallback`.
  double tolerance(const std::string& name, double fallback) const;
};

/// Validates the common fields; command-specific sections stay in `raw`.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace gdoc
