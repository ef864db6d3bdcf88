#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gdoc/json_io.hpp"

namespace gdoc {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitSizeCap = 3 };

struct CheckResult {
  std::string name;
  std::string instance;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

Json check_to_json(const CheckResult& c);

/// Output of one command: the exit code, a JSON report and the files to write (name → contents).
struct Report {
  std::string command;
  int exit_code = kExitPass;
  Json json;
  std::vector<std::pair<std::string, std::string>> files;
};

/// Certification, resummation, norm bound, factorization, swap, supercluster resummation,
/// partition ratio and subset identity checks. Writes verify.json.
Report run_verify(const ExperimentConfig& config);
/// decay.csv (beta,distance,abs_cov,ln_abs_cov) and decay.json.
Report run_decay(const ExperimentConfig& config);
/// count.csv (D,R,k,count,bound,ratio) and count.json.
Report run_count(const ExperimentConfig& config);
/// ising.csv (beta,i,j,cov,closed_form,abs_dev) and ising.json.
Report run_ising(const ExperimentConfig& config);
/// certify.json with the per-centre constants and the bound certificate.
Report run_certify(const ExperimentConfig& config);

/// Dispatches on `command`; ConfigError and SizeCapError propagate.
Report run_command(const std::string& command, const ExperimentConfig& config);

/// Writes every file of the report into `dir`, creating it if needed.
void write_report(const Report& report, const std::string& dir);

/// "%.17g", with "inf", "-inf" and "nan" spelled out.
std::string format_double(double x);

}  // namespace gdoc
