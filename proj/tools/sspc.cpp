#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sspc/experiment.hpp"

namespace {

int run_command(const std::string& config_path, const std::optional<std::string>& out, unsigned workers, bool quiet) {
  const auto config = sspc::load_config(config_path);
  sspc::RunOptions opts;
  if (out) opts.out = *out;
  if (workers > 0) opts.workers = workers;
  const auto rep = sspc::run_experiment(config, opts);
  if (!quiet) {
    std::cout << rep.report["kind"].get<std::string>() << " (" << rep.report["anchor"].get<std::string>()
              << "): " << rep.report["status"].get<std::string>() << "\n";
    std::cout << "output: " << rep.out_dir.string() << "\n";
    for (const auto& f : rep.files) std::cout << "  " << f << "\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    std::printf("wall-clock: %.3f s\n", rep.wall_seconds);
  }
  for (const auto& v : rep.violations) std::cerr << "violation: " << v << "\n";
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical pseudospectra and subelliptic decay experiments"};
  app.require_subcommand(1);
  std::optional<std::string> out;
  unsigned workers = 0;
  bool quiet = false;
  app.add_option("--out", out, "Output directory (overrides SSPC_OUT and the config)");
  app.add_option("--workers", workers, "Worker threads (0 = config or available parallelism)");
  app.add_flag("--quiet", quiet, "Suppress the run summary");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Experiment config")->required();
  run->fallthrough();
  auto* validate = app.add_subcommand("validate", "Check a config against the schema");
  validate->add_option("config", config_path, "Experiment config")->required();
  validate->fallthrough();
  auto* list = app.add_subcommand("list-models", "List the built-in models");
  auto* version = app.add_subcommand("version", "Print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_command(config_path, out, workers, quiet);
    if (*validate) {
      sspc::load_config(config_path);
      if (!quiet) std::cout << config_path << ": valid\n";
      return 0;
    }
    if (*list) {
      for (const auto& m : sspc::model_catalog()) std::cout << m.name << "\t" << m.description << "\n";
      return 0;
    }
    if (*version) {
      std::cout << "sspc " << SSPC_VERSION << "\n";
      return 0;
    }
  } catch (const sspc::AssumptionViolation& e) {
    std::cerr << "sspc: assumption violated (" << e.anchor() << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sspc: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
