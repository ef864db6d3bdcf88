#include "gdoc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gdoc/error.hpp"

namespace gdoc {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int positive_int(const Json& j, const char* key, int fallback) {
  const int v = get_or<int>(j, key, fallback);
  if (v < 1) throw ConfigError(std::string("field \"") + key + "\" must be a positive integer");
  return v;
}

Region lattice_from_json(const Json& j, int D) {
  if (j.is_array()) return region_from_json(j, D);
  if (j.is_object() && j.contains("chain")) {
    if (D != 1) throw ConfigError("\"chain\" lattices need D = 1");
    const int n = j.at("chain").get<int>();
    if (n < 1) throw ConfigError("chain length must be positive");
    return chain_geometry(n, 1).lambda;
  }
  if (j.is_object() && j.contains("box")) {
    const auto ext = j.at("box").get<std::vector<int>>();
    if (static_cast<int>(ext.size()) != D) throw ConfigError("\"box\" needs one extent per dimension");
    for (int e : ext) {
      if (e < 1) throw ConfigError("box extents must be positive");
    }
    std::vector<int> lo(ext.size(), 0), hi;
    for (int e : ext) hi.push_back(e - 1);
    return box_geometry(lo, hi, 1).lambda;
  }
  throw ConfigError("\"lattice\" must be an array of sites, {\"chain\": n} or {\"box\": [...]}");
}

std::vector<Coupling> couplings_from_json(const Json& j, const Region& lambda, int D, const char* name) {
  if (j.is_number()) return nearest_neighbour_couplings(lambda, j.get<double>());
  if (!j.is_array()) throw ConfigError(std::string("\"") + name + "\" must be a number or a list");
  std::vector<Coupling> out;
  for (const auto& e : j) {
    if (!e.is_array() || (e.size() != 3 && e.size() != 4)) {
      throw ConfigError(std::string("\"") + name + "\" entries are [x, y, re] or [x, y, re, im]");
    }
    const double re = e[2].get<double>();
    const double im = e.size() == 4 ? e[3].get<double>() : 0.0;
    out.push_back({site_from_json(e[0], D), site_from_json(e[1], D), cplx(re, im)});
  }
  return out;
}

}  // namespace

Site site_from_json(const Json& j, int D) {
  if (j.is_number_integer() && D == 1) return Site{j.get<int>()};
  if (!j.is_array()) throw ConfigError("a site is an array of " + std::to_string(D) + " integers");
  std::vector<int> c;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ConfigError("site coordinates must be integers");
    c.push_back(v.get<int>());
  }
  if (static_cast<int>(c.size()) != D) {
    throw ConfigError("site " + j.dump() + " does not have " + std::to_string(D) + " coordinates");
  }
  return Site(std::move(c));
}

Json site_to_json(const Site& x) { return Json(x.coords); }

Region region_from_json(const Json& j, int D) {
  if (!j.is_array()) throw ConfigError("a region is an array of sites");
  std::vector<Site> sites;
  for (const auto& s : j) sites.push_back(site_from_json(s, D));
  return Region(std::move(sites));
}

Json region_to_json(const Region& r) {
  Json out = Json::array();
  for (const auto& x : r) out.push_back(site_to_json(x));
  return out;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("a matrix is a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  ComplexMatrix M(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        M(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        M(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError("matrix entries are numbers or [re, im] pairs");
      }
    }
  }
  return M;
}

Json matrix_to_json(const ComplexMatrix& M) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(Json::array({M(r, c).real(), M(r, c).imag()}));
    out.push_back(std::move(row));
  }
  return out;
}

static HamiltonianSpec spec_from_json_impl(const Json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw ConfigError("model must be a JSON object");
  const int D = positive_int(j, "D", 1);
  const int R = positive_int(j, "R", 1);
  const int q = get_or<int>(j, "q", 2);
  if (q < 2) throw ConfigError("q must be at least 2");
  const Region lambda = lattice_from_json(require(j, "lattice"), D);
  const std::string kind = get_or<std::string>(j, "model", "xxz");
  std::optional<double> claimed;
  if (j.contains("a")) claimed = get_or<double>(j, "a", 0.0);

  if (kind == "xxz") {
    if (q != 2) throw ConfigError("xxz needs q = 2");
    XxzParams p;
    p.lambda = get_or<double>(j, "lambda", 0.0);
    p.seed = get_or<std::uint64_t>(j, "seed", default_seed);
    p.R = R;
    p.claimed_a = claimed;
    if (j.contains("J12")) p.J12 = couplings_from_json(j.at("J12"), lambda, D, "J12");
    if (j.contains("J3")) p.J3 = couplings_from_json(j.at("J3"), lambda, D, "J3");
    return xxz_spec(lambda, p);
  }
  if (kind == "custom") {
    std::vector<OnSiteTerm> onsite;
    for (const auto& e : require(j, "onsite")) {
      onsite.push_back({site_from_json(require(e, "site"), D), matrix_from_json(require(e, "matrix"))});
    }
    std::vector<InteractionTerm> terms;
    if (j.contains("interactions")) {
      for (const auto& e : j.at("interactions")) {
        terms.push_back({site_from_json(require(e, "center"), D), region_from_json(require(e, "support"), D),
                         matrix_from_json(require(e, "matrix"))});
      }
    }
    return make_spec(LatticeGeometry(D, R, lambda), q, std::move(onsite), std::move(terms), claimed);
  }
  throw ConfigError("unknown model \"" + kind + "\" (expected \"xxz\" or \"custom\")");
}

HamiltonianSpec spec_from_json(const Json& j, std::uint64_t default_seed) {
  try {
    return spec_from_json_impl(j, default_seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
}

Json spec_to_json(const HamiltonianSpec& spec) {
  Json j;
  j["D"] = spec.geometry.D;
  j["R"] = spec.geometry.R;
  j["q"] = spec.q;
  j["lattice"] = region_to_json(spec.geometry.lambda);
  j["model"] = "custom";
  Json onsite = Json::array();
  for (const auto& [x, h] : spec.onsite) {
    onsite.push_back(Json{{"site", site_to_json(x)}, {"matrix", matrix_to_json(h.matrix)}});
  }
  j["onsite"] = std::move(onsite);
  Json terms = Json::array();
  for (const auto& [x, v] : spec.interactions) {
    terms.push_back(Json{{"center", site_to_json(x)},
                         {"support", region_to_json(v.support)},
                         {"matrix", matrix_to_json(v.matrix)}});
  }
  j["interactions"] = std::move(terms);
  j["a"] = spec.a;
  return j;
}

ObservableSpec observable_from_json(const Json& j, int D) {
  ObservableSpec o;
  o.anchor = site_from_json(require(j, "anchor"), D);
  if (j.contains("string")) {
    for (const auto& f : j.at("string")) {
      PauliFactor pf;
      pf.offset = f.contains("offset") ? f.at("offset").get<std::vector<int>>() : std::vector<int>(D, 0);
      pf.pauli = get_or<int>(f, "pauli", 3);
      o.pauli.push_back(std::move(pf));
    }
  } else {
    o.pauli.push_back({std::vector<int>(D, 0), get_or<int>(j, "pauli", 3)});
  }
  if (o.pauli.empty()) throw ConfigError("observable string is empty");
  for (const auto& f : o.pauli) {
    if (f.pauli < 0 || f.pauli > 3) throw ConfigError("Pauli index must be 0..3");
    if (static_cast<int>(f.offset.size()) != D) throw ConfigError("observable offset has the wrong dimension");
  }
  return o;
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.raw = j;
  c.command = get_or<std::string>(j, "command", "");
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.output_dir = get_or<std::string>(j, "output_dir", ".");
  if (j.contains("model")) c.model = j.at("model");
  const int D = c.model.is_object() ? get_or<int>(c.model, "D", 1) : 1;

  c.betas = get_or<std::vector<double>>(j, "betas", {});
  for (double b : c.betas) {
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("betas must be positive finite numbers");
  }
  c.distances = get_or<std::vector<int>>(j, "distances", {});
  for (std::size_t k = 1; k < c.distances.size(); ++k) {
    if (c.distances[k] <= c.distances[k - 1]) throw ConfigError("distances must be strictly increasing");
  }
  if (j.contains("observables")) {
    const Json& obs = j.at("observables");
    if (!obs.is_object()) throw ConfigError("\"observables\" must map names to observables");
    for (const auto& [name, o] : obs.items()) c.observables.emplace(name, observable_from_json(o, D));
  }
  if (j.contains("tolerances")) {
    const Json& tol = j.at("tolerances");
    if (!tol.is_object()) throw ConfigError("\"tolerances\" must map names to numbers");
    for (const auto& [name, v] : tol.items()) {
      if (!v.is_number() || !(v.get<double>() >= 0.0)) throw ConfigError("tolerance \"" + name + "\" must be >= 0");
      c.tolerances[name] = v.get<double>();
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

}  // namespace gdoc
