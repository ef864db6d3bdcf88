#include <doctest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gdoc/error.hpp"
#include "gdoc/json_io.hpp"
#include "gdoc/runner.hpp"
#include "oracles.hpp"

using namespace gdoc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("gdoc_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GDOC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kFreeModel = R"({"D":1,"R":1,"q":2,"lattice":{"chain":5},"model":"xxz","lambda":0.3,"seed":3})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("sites, regions and matrices round-trip through JSON") {
  const Region r{Site{0, 1}, Site{2, 3}};
  CHECK(region_from_json(region_to_json(r), 2) == r);
  CHECK(site_from_json(Json(4), 1) == Site{4});
  CHECK_THROWS_AS(site_from_json(Json::array({1, 2}), 1), ConfigError);
  const ComplexMatrix M = pauli::sigma2();
  CHECK(relative_residual(matrix_from_json(matrix_to_json(M)), M) == 0.0);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1,2]]")), ConfigError);
}

TEST_CASE("xxz model JSON and its custom serialization describe the same Hamiltonian") {
  const Json j = Json::parse(
      R"({"D":1,"R":1,"lattice":{"chain":5},"model":"xxz","lambda":0.3,"seed":7,"J12":[[0,1,0.02],[1,2,0.02],[2,3,0.02],[3,4,0.02]],"J3":0.02})");
  const auto spec = spec_from_json(j);
  const auto ref = oracle::xxz_chain(5, 0.02, 0.3, 7);
  const auto& L = ref.geometry.lambda;
  CHECK(relative_residual(build_restricted(spec, L).H.matrix, build_restricted(ref, L).H.matrix) == 0.0);
  const auto again = spec_from_json(spec_to_json(spec));
  CHECK(relative_residual(build_restricted(again, L).H.matrix, build_restricted(ref, L).H.matrix) == 0.0);
  CHECK(again.a == doctest::Approx(spec.a));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"distances":[3,2]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"betas":[1,-1]})")), ConfigError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"lattice":{"chain":3},"model":"nope"})")), ConfigError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"lattice":{"chain":3},"lambda":"x"})")), ConfigError);
  const auto c = config_from_json(Json::parse(R"({"tolerances":{"identity":1e-8},"observables":{"A":{"anchor":2}}})"));
  CHECK(c.tolerance("identity", 1.0) == 1e-8);
  CHECK(c.tolerance("other", 0.5) == 0.5);
  CHECK(c.observables.at("A").anchor == Site{2});
}

TEST_CASE("count command reproduces small lattice-animal numbers") {
  ExperimentConfig c = config_from_json(Json::parse(R"({"count":{"D":1,"R":1,"k_max":2}})"));
  const Report r = run_count(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.json["rows"][0]["count"] == 1);
  CHECK(r.json["rows"][1]["count"] == 4);
  CHECK(r.json["rows"][1]["bound"].get<double>() == doctest::Approx(16.3097));
  c.raw["count"]["k_max"] = 7;
  CHECK_THROWS_AS(run_count(c), SizeCapError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch_dir();
  const auto out = (dir / "out").string();
  CHECK(run_cli("verify --config " + write_file("bad.json", "{\"model\": ").string() + " --out " + out) == 2);
  CHECK(run_cli("frobnicate --config x.json") == 2);
  CHECK(run_cli("verify --config " + (dir / "missing.json").string()) == 2);

  const auto unc = write_file(
      "unc.json", R"({"model":{"lattice":{"chain":5},"model":"xxz","lambda":0.3,"J12":0.45,"J3":0.45}})");
  CHECK(run_cli("verify --config " + unc.string() + " --out " + out) == 1);
  const Json report = Json::parse(read_file(fs::path(out) / "verify.json"));
  CHECK(report["certify"]["center"] == Json::array({1}));

  const auto free = write_file("free.json", std::string(R"({"betas":[1.0],"model":)") + kFreeModel + "}");
  CHECK(run_cli("verify --config " + free.string() + " --out " + out) == 0);

  const auto br = write_file(
      "bracket.json",
      R"({"checks":["bracket"],"model":{"lattice":{"chain":6},"model":"xxz","lambda":0.3,"seed":7,"J12":0.02,"J3":0.02}})");
  CHECK(run_cli("verify --config " + br.string() + " --out " + out) == 0);
  CHECK(Json::parse(read_file(fs::path(out) / "verify.json"))["checks"][0]["tolerance"] == 1e-9);

  const auto over = write_file(
      "over.json", R"({"model":{"lattice":{"chain":5},"model":"xxz","J12":0.45,"J3":0.45,"a":5.0}})");
  CHECK(run_cli("verify --config " + over.string() + " --out " + out) == 1);

  const auto big = write_file("big.json", R"({"model":{"lattice":{"chain":13},"model":"xxz"}})");
  CHECK(run_cli("verify --config " + big.string() + " --out " + out) == 3);

  const auto cnt = write_file("count.json", R"({"count":{"D":2,"R":1,"k_max":3}})");
  CHECK(run_cli("count --config " + cnt.string() + " --out " + out) == 0);
  const auto cap = write_file("cap.json", R"({"count":{"D":4,"R":1,"k_max":3}})");
  CHECK(run_cli("count --config " + cap.string() + " --out " + out) == 3);

  const auto ising = write_file("ising.json", R"({"ising":{"n":8,"J":1},"betas":[0.5, 1e-8]})");
  CHECK(run_cli("ising --config " + ising.string() + " --out " + out + " --threads 1") == 0);
}

TEST_CASE("decay output is complete and byte-identical across runs") {
  const auto dir = scratch_dir();
  const auto cfg = write_file(
      "decay.json",
      R"({"model":{"lattice":{"chain":8},"model":"xxz","lambda":0.3,"J12":0.05,"J3":0.05},"seed":9,"betas":[1,5],"distances":[1,2,3,4]})");
  REQUIRE(run_cli("decay --config " + cfg.string() + " --out " + (dir / "d1").string()) == 0);
  REQUIRE(run_cli("decay --config " + cfg.string() + " --out " + (dir / "d2").string()) == 0);
  const std::string csv = read_file(dir / "d1" / "decay.csv");
  CHECK(csv == read_file(dir / "d2" / "decay.csv"));
  CHECK(read_file(dir / "d1" / "decay.json") == read_file(dir / "d2" / "decay.json"));
  CHECK(csv.rfind("beta,distance,abs_cov,ln_abs_cov\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 4);
  CHECK(csv.find('\r') == std::string::npos);
  const Json j = Json::parse(read_file(dir / "d1" / "decay.json"));
  CHECK(j["schema"] == 1);
  CHECK(j["fits"].size() == 2);
}

TEST_CASE("free model decay is degenerate") {
  const auto c = config_from_json(
      Json::parse(std::string(R"({"betas":[1],"distances":[1,2,3],"model":)") + kFreeModel + "}"));
  const Report r = run_decay(c);
  CHECK(r.json["fits"][0]["degenerate"] == true);
  CHECK(r.json["fits"][0]["xi"].is_null());
}

TEST_CASE("certify reports the constants") {
  const auto c = config_from_json(Json::parse(
      R"({"model":{"lattice":{"chain":5},"model":"xxz","lambda":0.3,"seed":7,"J12":0.02,"J3":0.02}})"));
  const Report r = run_certify(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.json["local_a"].size() == 3);
  CHECK(r.json["certificate"]["ratio_constant"].get<double>() == doctest::Approx(8.0));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

}  // TEST_SUITE
