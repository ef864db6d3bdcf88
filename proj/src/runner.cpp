#include "gdoc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>

#include "gdoc/error.hpp"
#include "gdoc/expansion.hpp"
#include "gdoc/gibbs.hpp"

namespace gdoc {

namespace {

constexpr double kIdentityTolerance = 1e-10;
constexpr double kSpectrumTolerance = 1e-9;
constexpr double kNormSlack = 1e-12;
constexpr std::size_t kMaxVerifySites = 12;

std::string beta_label(double beta) { return "beta=" + format_double(beta); }

Json nullable(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

GlobalOperator observable(const ExperimentConfig& config, const std::string& name, const Site& fallback) {
  auto it = config.observables.find(name);
  if (it == config.observables.end()) return place_template(PauliTemplate{{std::vector<int>(fallback.dim(), 0), 3}}, fallback);
  return place_template(it->second.pauli, it->second.anchor);
}

GlobalOperator observable_from(const Json& section, const char* key, int D, const GlobalOperator& fallback) {
  if (!section.contains(key)) return fallback;
  const ObservableSpec o = observable_from_json(section.at(key), D);
  return place_template(o.pauli, o.anchor);
}

Region region_field(const Json& section, const char* key, int D) {
  if (!section.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  return region_from_json(section.at(key), D);
}

void require_inside(const HamiltonianSpec& spec, const GlobalOperator& O, const char* name) {
  if (!spec.geometry.lambda.includes(O.region)) {
    throw ConfigError(std::string("observable ") + name + " does not fit inside the lattice");
  }
}

Json certification_failure(const CertificationError& e) {
  return Json{{"name", "certify"},
              {"center", site_to_json(e.center())},
              {"message", e.what()},
              {"pass", false}};
}

Report failed_certification(const std::string& command, const CertificationError& e) {
  Report r;
  r.command = command;
  r.exit_code = kExitFail;
  r.json = Json{{"schema", 1}, {"command", command}, {"pass", false}, {"certify", certification_failure(e)}};
  r.files.emplace_back(command + ".json", r.json.dump(2) + "\n");
  return r;
}

// Connected S with |S| <= k_max, each listed once (from its smallest site).
std::vector<Region> connected_sets_up_to(const LatticeGeometry& geo, int k_max) {
  std::vector<Region> out;
  for (const auto& v1 : geo.lambda) {
    for (int k = 1; k <= k_max; ++k) {
      for (auto& S : enumerate_connected_sets(v1, k, geo)) {
        if (S[0] == v1) out.push_back(std::move(S));
      }
    }
  }
  return out;
}

std::vector<std::string> selected_checks(const Json& raw) {
  if (raw.contains("checks")) {
    const Json& c = raw.at("checks");
    if (!c.is_array()) throw ConfigError("\"checks\" must be a list of check names");
    std::vector<std::string> out;
    for (const auto& n : c) out.push_back(n.get<std::string>());
    return out;
  }
  std::vector<std::string> out = {"resummation", "norm_bound", "swap", "partition_ratio", "subset_identity"};
  if (raw.contains("factorization")) out.push_back("factorization");
  if (raw.contains("supercluster")) out.push_back("supercluster");
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json check_to_json(const CheckResult& c) {
  return Json{{"name", c.name},
              {"instance", c.instance},
              {"residual", nullable(c.residual + 0.0)},
              {"tolerance", c.tolerance},
              {"pass", c.pass}};
}

Report run_verify(const ExperimentConfig& config) {
  std::optional<HamiltonianSpec> loaded;
  try {
    loaded.emplace(spec_from_json(config.model, config.seed));
  } catch (const CertificationError& e) {
    return failed_certification("verify", e);
  }
  const HamiltonianSpec& spec = *loaded;
  const auto& geo = spec.geometry;
  if (geo.lambda.size() > kMaxVerifySites) {
    throw SizeCapError("verify needs |Λ| <= " + std::to_string(kMaxVerifySites) + ", got " +
                       std::to_string(geo.lambda.size()));
  }
  const std::vector<double> betas = config.betas.empty() ? std::vector<double>{0.5, 2.0, 10.0} : config.betas;
  const double tol = config.tolerance("identity", kIdentityTolerance);
  const GlobalOperator A = observable(config, "A", geo.lambda[0]);
  const GlobalOperator B = observable(config, "B", geo.lambda[geo.lambda.size() - 1]);
  require_inside(spec, A, "A");
  require_inside(spec, B, "B");
  const Json& raw = config.raw;
  const int D = geo.D;

  std::vector<CheckResult> checks;
  for (const auto& name : selected_checks(raw)) {
    if (name == "resummation") {
      for (double b : betas) {
        const double r = verify_resummation(spec, b);
        checks.push_back({name, beta_label(b), r, tol, r <= tol});
      }
    } else if (name == "norm_bound") {
      const auto max_size = static_cast<std::size_t>(raw.value("norm_max_size", 3));
      const double slack = config.tolerance("norm_slack", kNormSlack);
      for (double b : betas) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& e : norm_bound_scan(spec, b, max_size)) worst = std::max(worst, e.norm - e.bound);
        checks.push_back({name, beta_label(b) + ",max_size=" + std::to_string(max_size), worst, slack,
                          worst <= slack});
      }
    } else if (name == "factorization") {
      const Json sec = raw.value("factorization", Json::object());
      const Region I1 = region_field(sec, "I1", D);
      const Region I2 = region_field(sec, "I2", D);
      const GlobalOperator O1 = observable_from(sec, "O1", D, A);
      const GlobalOperator O2 = observable_from(sec, "O2", D, B);
      require_inside(spec, O1, "O1");
      require_inside(spec, O2, "O2");
      for (double b : betas) {
        const double r = verify_factorization(I1, O1, I2, O2, spec, b);
        checks.push_back({name, beta_label(b), r, tol, r <= tol});
      }
    } else if (name == "swap") {
      for (double b : betas) {
        const SwapReport s = verify_swap_identity(spec, A, B, b);
        const double r = std::max(s.residual, s.max_pair_residual);
        checks.push_back({name, beta_label(b) + ",event_pairs=" + std::to_string(s.event_pairs), r, tol,
                          r <= tol && s.involution_ok && s.decomposition_invariant});
      }
    } else if (name == "supercluster") {
      const Json sec = raw.value("supercluster", Json::object());
      const Region I0 = region_field(sec, "I0", D);
      const Region J0 = region_field(sec, "J0", D);
      const GlobalOperator SA = observable_from(sec, "A", D, A);
      const GlobalOperator SB = observable_from(sec, "B", D, B);
      require_inside(spec, SA, "A");
      require_inside(spec, SB, "B");
      for (double b : betas) {
        const SuperclusterReport s = verify_supercluster_resummation(I0, J0, SA, SB, spec, b);
        const double r = std::max({s.residual_joint, s.residual_split, s.residual_ratio});
        checks.push_back({name, beta_label(b) + ",class_size=" + std::to_string(s.class_size), r, tol, r <= tol});
      }
    } else if (name == "partition_ratio") {
      const int max_size = raw.value("partition_max_size", 3);
      const HamiltonianSpec normalized = normalize_nonpositive(spec);
      const auto sets = connected_sets_up_to(geo, max_size);
      for (double b : betas) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& S : sets) {
          const PartitionRatio p = partition_ratio(S, normalized, b);
          worst = std::max({worst, p.ratio / p.bound - 1.0, -p.monotone_gap});
        }
        checks.push_back({name, beta_label(b) + ",sets=" + std::to_string(sets.size()), worst, kNormSlack,
                          worst <= kNormSlack});
      }
    } else if (name == "subset_identity") {
      const double p = bound_certificate(spec).p;
      double worst = 0.0;
      for (int F = 0; F <= 12; ++F) {
        const auto [lhs, rhs] = subset_sum_identity_check(F, p);
        worst = std::max(worst, relative_residual(lhs, rhs));
      }
      checks.push_back({name, "F=0..12,p=" + format_double(p), worst, tol, worst <= tol});
    } else if (name == "bracket") {
      const double v = bracket_violation(spec, spec.geometry.lambda);
      const double stol = config.tolerance("spectrum", kSpectrumTolerance);
      checks.push_back({name, "lambda", v, stol, v <= stol});
    } else {
      throw ConfigError("unknown check \"" + name + "\"");
    }
  }

  bool pass = true;
  Json list = Json::array();
  for (const auto& c : checks) {
    pass = pass && c.pass;
    list.push_back(check_to_json(c));
  }
  Report r;
  r.command = "verify";
  r.exit_code = pass ? kExitPass : kExitFail;
  r.json = Json{{"schema", 1}, {"command", "verify"}, {"pass", pass}, {"a", spec.a}, {"checks", std::move(list)}};
  r.files.emplace_back("verify.json", r.json.dump(2) + "\n");
  return r;
}

Report run_decay(const ExperimentConfig& config) {
  if (config.betas.empty()) throw ConfigError("decay needs a nonempty \"betas\" list");
  if (config.distances.empty()) throw ConfigError("decay needs a nonempty \"distances\" list");
  std::optional<HamiltonianSpec> loaded;
  try {
    loaded.emplace(spec_from_json(config.model, config.seed));
  } catch (const CertificationError& e) {
    return failed_certification("decay", e);
  }
  const HamiltonianSpec& spec = *loaded;
  const Site origin = spec.geometry.lambda[0];
  auto pick = [&](const char* name) {
    auto it = config.observables.find(name);
    if (it != config.observables.end()) return it->second;
    return ObservableSpec{PauliTemplate{{std::vector<int>(origin.dim(), 0), 3}}, origin};
  };
  const ObservableSpec A = pick("A");
  const ObservableSpec B = pick("B");
  const double floor = config.tolerance("floor", kNumericalFloor);
  const auto fits = decay_sweep(spec, config.betas, A.pauli, B.pauli, A.anchor, config.distances, floor);

  std::string csv = "beta,distance,abs_cov,ln_abs_cov\n";
  Json jf = Json::array();
  double max_xi = -std::numeric_limits<double>::infinity();
  bool all_finite = true;
  for (const auto& f : fits) {
    for (const auto& p : f.points) {
      csv += format_double(f.beta) + "," + std::to_string(p.distance) + "," + format_double(p.abs_cov) + "," +
             format_double(std::log(p.abs_cov)) + "\n";
    }
    all_finite = all_finite && f.finite();
    if (f.finite()) max_xi = std::max(max_xi, f.xi);
    jf.push_back(Json{{"beta", f.beta},
                      {"xi", nullable(f.xi)},
                      {"slope", nullable(f.slope)},
                      {"intercept", nullable(f.intercept)},
                      {"points_used", f.points_used},
                      {"degenerate", f.degenerate}});
  }
  Report r;
  r.command = "decay";
  r.json = Json{{"schema", 1},
                {"command", "decay"},
                {"a", spec.a},
                {"floor", floor},
                {"fits", std::move(jf)},
                {"max_xi", nullable(max_xi)},
                {"all_finite", all_finite}};
  r.files.emplace_back("decay.csv", csv);
  r.files.emplace_back("decay.json", r.json.dump(2) + "\n");
  return r;
}

Report run_count(const ExperimentConfig& config) {
  const Json sec = config.raw.value("count", Json::object());
  const int D = sec.value("D", 1);
  const int R = sec.value("R", 1);
  const int k_max = sec.value("k_max", 4);
  if (D < 1 || R < 1 || k_max < 1) throw ConfigError("count needs D, R, k_max >= 1");
  if (D > 3 || k_max > 6) throw SizeCapError("count needs D <= 3 and k <= 6");
  const double branching = static_cast<double>(connectivity_offsets(D, R).size());
  if (std::pow(branching, k_max - 1) > 2e7) {
    throw SizeCapError("count: " + format_double(branching) + "^(k-1) candidate extensions exceed the cap of 2e7");
  }
  // A box large enough that no connected set of size k_max around its centre is clipped.
  const int half = 2 * R * (k_max - 1);
  const LatticeGeometry geo = box_geometry(std::vector<int>(D, -half), std::vector<int>(D, half), R);
  const Site v1(std::vector<int>(D, 0));

  std::string csv = "D,R,k,count,bound,ratio\n";
  Json rows = Json::array();
  bool pass = true;
  for (int k = 1; k <= k_max; ++k) {
    const std::size_t n = count_connected_sets(v1, k, geo);
    const double bound = connected_set_bound(D, R, k);
    const double ratio = static_cast<double>(n) / bound;
    pass = pass && static_cast<double>(n) <= bound;
    csv += std::to_string(D) + "," + std::to_string(R) + "," + std::to_string(k) + "," + std::to_string(n) + "," +
           format_double(bound) + "," + format_double(ratio) + "\n";
    rows.push_back(Json{{"k", k}, {"count", n}, {"bound", bound}, {"ratio", ratio}});
  }
  Report r;
  r.command = "count";
  r.exit_code = pass ? kExitPass : kExitFail;
  r.json = Json{{"schema", 1}, {"command", "count"}, {"D", D}, {"R", R}, {"pass", pass}, {"rows", std::move(rows)}};
  r.files.emplace_back("count.csv", csv);
  r.files.emplace_back("count.json", r.json.dump(2) + "\n");
  return r;
}

Report run_ising(const ExperimentConfig& config) {
  const Json sec = config.raw.value("ising", Json::object());
  const int n = sec.value("n", 10);
  const double J = sec.value("J", 1.0);
  if (n < 2) throw ConfigError("ising needs n >= 2");
  if (n > 12) throw SizeCapError("ising needs n <= 12");
  const std::vector<double> betas = config.betas.empty() ? std::vector<double>{0.5} : config.betas;
  const double cov_tol = config.tolerance("cov", kIdentityTolerance);
  const double xi_tol = config.tolerance("xi", 1e-6);

  const GlobalOperator H = ising_chain_hamiltonian(n, J);
  const Eigensystem es = herm_eig(H.matrix);
  std::vector<GlobalOperator> Z;
  for (int k = 0; k < n; ++k) Z.push_back(embed(pauli::sigma3(), Region{Site{k}}, H.region, 2));

  std::string csv = "beta,i,j,cov,closed_form,abs_dev\n";
  Json per_beta = Json::array();
  bool pass = true;
  for (double b : betas) {
    const ThermalState st = gibbs_state(es, H.region, 2, b);
    double max_dev = 0.0;
    std::vector<DecayPoint> pts;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double c = covariance(st, Z[i], Z[j]).real();
        const double exact = ising_closed_form(J, b, i, j);
        const double dev = std::abs(c - exact);
        max_dev = std::max(max_dev, dev);
        if (i == 0) pts.push_back({j, std::abs(c)});
        csv += format_double(b) + "," + std::to_string(i) + "," + std::to_string(j) + "," + format_double(c) + "," +
               format_double(exact) + "," + format_double(dev) + "\n";
      }
    }
    const double xi_exact = -1.0 / std::log(std::tanh(b * J));
    Json entry{{"beta", b}, {"max_abs_dev", max_dev}, {"cov_tolerance", cov_tol}, {"xi_closed_form", nullable(xi_exact)}};
    bool ok = max_dev <= cov_tol;
    std::size_t usable = 0;
    for (const auto& p : pts) usable += p.abs_cov > kNumericalFloor ? 1 : 0;
    if (usable >= 2) {
      const DecayFit f = fit_decay(pts);
      const double rel = std::abs(f.xi - xi_exact) / std::abs(xi_exact);
      entry["xi_fit"] = nullable(f.xi);
      entry["xi_rel_err"] = nullable(rel);
      entry["xi_tolerance"] = xi_tol;
      ok = ok && rel <= xi_tol;
    } else {
      entry["xi_fit"] = nullptr;
      entry["xi_skipped"] = "fewer than two covariances above the numerical floor";
    }
    entry["pass"] = ok;
    pass = pass && ok;
    per_beta.push_back(std::move(entry));
  }
  Report r;
  r.command = "ising";
  r.exit_code = pass ? kExitPass : kExitFail;
  r.json = Json{{"schema", 1}, {"command", "ising"}, {"n", n}, {"J", J}, {"pass", pass}, {"betas", std::move(per_beta)}};
  r.files.emplace_back("ising.csv", csv);
  r.files.emplace_back("ising.json", r.json.dump(2) + "\n");
  return r;
}

Report run_certify(const ExperimentConfig& config) {
  std::optional<HamiltonianSpec> loaded;
  try {
    loaded.emplace(spec_from_json(config.model, config.seed));
  } catch (const CertificationError& e) {
    return failed_certification("certify", e);
  }
  const HamiltonianSpec& spec = *loaded;
  Json local = Json::array();
  for (const auto& [x, a] : spec.local_a) local.push_back(Json{{"center", site_to_json(x)}, {"a", a}});
  const BoundCertificate c = bound_certificate(spec);
  Report r;
  r.command = "certify";
  r.json = Json{{"schema", 1},
                {"command", "certify"},
                {"pass", true},
                {"a", spec.a},
                {"local_a", std::move(local)},
                {"nonpositive", spec.nonpositive},
                {"certificate",
                 Json{{"p", c.p},
                      {"counting_constant", c.counting_constant},
                      {"ratio_constant", c.ratio_constant},
                      {"decay_base", c.decay_base},
                      {"prefactor_exponent", nullable(c.prefactor_exponent)},
                      {"active", c.active}}}};
  r.files.emplace_back("certify.json", r.json.dump(2) + "\n");
  return r;
}

Report run_command(const std::string& command, const ExperimentConfig& config) {
  if (command == "verify") return run_verify(config);
  if (command == "decay") return run_decay(config);
  if (command == "count") return run_count(config);
  if (command == "ising") return run_ising(config);
  if (command == "certify") return run_certify(config);
  throw ConfigError("unknown command \"" + command + "\" (expected verify, decay, count, ising or certify)");
}

void write_report(const Report& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
  for (const auto& [name, contents] : report.files) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
  }
}

}  // namespace gdoc
