// ehrenfest-lab: reproducible wave-packet experiments from a JSON config.
//
//   ehrenfest-lab run      --config cfg.json [--scenario s] [--hbar v]
//                          [--t-final v] [--seed n] [--out dir]
//   ehrenfest-lab sweep    --config cfg.json [...]   (hbar must be a list)
//   ehrenfest-lab validate --config cfg.json [...]
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/experiment.hpp"
#include "ehrenfest/text.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string scenario;
  std::vector<double> hbar;
  double t_final = -1.0;
  bool t_final_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

ehrenfest::ExperimentConfig load_config(const CliOverrides& cli) {
  std::ifstream in(cli.config_path);
  if (!in) throw ehrenfest::ConfigInvalid("config: cannot open '" + cli.config_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();

  auto cfg = ehrenfest::ExperimentConfig::from_json_text(buffer.str());
  if (!cli.scenario.empty()) {
    cfg.scenario = ehrenfest::scenario_from_name(cli.scenario);
    ehrenfest::apply_presets(cfg);
  }
  if (!cli.hbar.empty()) {
    cfg.hbar_values = cli.hbar;
    if (!cfg.grid_explicit) cfg.grid = ehrenfest::preset_grid(cfg.scenario, cfg.hbar_values.front());
  }
  if (cli.t_final_set) cfg.t_final = cli.t_final;
  if (cli.seed_set) cfg.seed = cli.seed;
  if (!cli.out.empty()) cfg.out_dir = cli.out;
  ehrenfest::apply_presets(cfg);
  return cfg;
}

void add_common_options(CLI::App* cmd, CliOverrides& cli) {
  cmd->add_option("--config", cli.config_path, "JSON experiment configuration")->required();
  cmd->add_option("--scenario", cli.scenario, "dilation|double-well|harmonic|free");
  cmd->add_option("--hbar", cli.hbar, "override hbar (repeat for sweep lists)");
  cmd->add_option("--t-final", cli.t_final, "override final time")
      ->each([&cli](const std::string&) { cli.t_final_set = true; });
  cmd->add_option("--seed", cli.seed, "override the sampling seed")
      ->each([&cli](const std::string&) { cli.seed_set = true; });
  cmd->add_option("--out", cli.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiclassical wave-packet laboratory"};
  app.require_subcommand(1);

  CliOverrides cli;
  auto* cmd_run = app.add_subcommand("run", "run one scenario and write diagnostics");
  auto* cmd_sweep = app.add_subcommand("sweep", "run per-hbar and fit a power law");
  auto* cmd_validate = app.add_subcommand("validate", "check a config without running");
  add_common_options(cmd_run, cli);
  add_common_options(cmd_sweep, cli);
  add_common_options(cmd_validate, cli);

  CLI11_PARSE(app, argc, argv);

  ehrenfest::ExperimentConfig cfg;
  try {
    cfg = load_config(cli);
  } catch (const ehrenfest::ConfigInvalid& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  // A failed run leaves error.json (never manifest.json, whose presence means
  // the run completed) describing what stopped it.
  auto record_failure = [&cfg](const std::string& kind, const std::string& message) {
    if (cfg.out_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) return;
    std::ofstream out(cfg.out_dir / "error.json");
    out << "{\n  \"error\": \"" << kind << "\",\n  \"message\": " << nlohmann::json(message).dump()
        << "\n}\n";
  };

  try {
    if (cmd_validate->parsed()) {
      auto issues = ehrenfest::validate(cfg);
      for (const auto& issue : issues)
        std::cout << (issue.is_error ? "error: " : "warning: ") << issue.message << "\n";
      if (issues.empty()) std::cout << "ok: no warnings\n";
      return 0;
    }

    auto manifest = cmd_run->parsed() ? ehrenfest::run(cfg) : ehrenfest::sweep(cfg);
    std::cout << "wrote " << manifest.artifacts.size() << " artifact(s) to " << cfg.out_dir.string()
              << " in " << ehrenfest::format_double(manifest.duration_seconds) << " s\n";
    for (const auto& [key, value] : manifest.summary)
      std::cout << "  " << key << " = " << ehrenfest::format_double(value) << "\n";
    return 0;
  } catch (const ehrenfest::ConfigInvalid& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ehrenfest::SimulationError& e) {
    std::cerr << e.what() << "\n";
    record_failure(e.kind(), e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::ios_base::failure& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    // Remaining failures are I/O-shaped (open/write) rather than numerical.
    std::cerr << e.what() << "\n";
    record_failure("Error", e.what());
    return 4;
  }
}
