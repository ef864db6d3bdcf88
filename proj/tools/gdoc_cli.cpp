#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gdoc/error.hpp"
#include "gdoc/parallel.hpp"
#include "gdoc/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cluster-expansion verification and decay-of-correlation sweeps"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  for (const char* name : {"verify", "decay", "count", "ising", "certify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--threads", threads, "worker threads, 0 = hardware concurrency");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gdoc::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  gdoc::set_thread_count(threads);

  try {
    const gdoc::ExperimentConfig config = gdoc::load_config(config_path);
    if (!config.command.empty() && config.command != command) {
      throw gdoc::ConfigError("config is for \"" + config.command + "\" but the command is \"" + command + "\"");
    }
    const gdoc::Report report = gdoc::run_command(command, config);
    gdoc::write_report(report, out_dir.empty() ? config.output_dir : out_dir);
    std::cout << report.json.dump(2) << "\n";
    return report.exit_code;
  } catch (const gdoc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gdoc::kExitConfig;
  } catch (const gdoc::SizeCapError& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return gdoc::kExitSizeCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gdoc::kExitFail;
  }
}
