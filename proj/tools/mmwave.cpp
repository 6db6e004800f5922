// Command-line front end: run sweeps, print presets, invert bounds.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mmwave/errors.hpp"
#include "mmwave/experiment.hpp"

namespace {

using namespace mmwave;

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string manifest_path(const std::string& csv) {
  std::filesystem::path p(csv);
  p.replace_extension(".manifest.json");
  return p.string();
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::string sweep;
  std::int64_t trials = 0;
  std::int64_t seed = -1;
  std::string out;
  std::string quantities;
};

ExperimentConfig resolve(const RunArgs& args) {
  if (!args.config.empty() && !args.preset.empty()) throw ConfigError("use either --config or --preset, not both");
  ExperimentConfig cfg;
  if (!args.config.empty()) {
    cfg = load_config(args.config);
  } else if (!args.preset.empty()) {
    cfg = preset(args.preset);
  } else {
    cfg.scenario = default_single_tier();
  }
  nlohmann::json j = config_to_json(cfg);
  if (cfg.quantities.empty()) j.erase("quantities");
  if (!args.sweep.empty()) {
    const SweepSpec s = parse_sweep(args.sweep);
    j["sweep"] = {{"param", s.param}, {"start", s.start}, {"stop", s.stop}, {"steps", s.steps}, {"log", s.log}};
  }
  if (!args.quantities.empty()) j["quantities"] = split_csv_list(args.quantities);
  if (args.trials != 0) j["trials"] = args.trials;
  if (args.seed >= 0) j["seed"] = static_cast<std::uint64_t>(args.seed);
  if (!args.out.empty()) j["out"] = args.out;
  return config_from_json(j);
}

int cmd_run(const RunArgs& args) {
  const ExperimentConfig cfg = resolve(args);
  const auto rows = run_experiment(cfg);
  if (cfg.out.empty() || cfg.out == "-") {
    write_csv(std::cout, rows);
    return 0;
  }
  std::ofstream csv(cfg.out);
  if (!csv) throw ConfigError("cannot write '" + cfg.out + "'");
  write_csv(csv, rows);
  const std::string mpath = manifest_path(cfg.out);
  std::ofstream manifest(mpath);
  if (!manifest) throw ConfigError("cannot write '" + mpath + "'");
  manifest << make_manifest(cfg).dump(2) << '\n';
  std::cerr << fmt::format("wrote {} rows to {} (manifest {})\n", rows.size(), cfg.out, mpath);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave connectivity on a random building lattice"};
  app.require_subcommand(1);
  app.set_version_flag("--version", toolkit_version());

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evaluate quantities over a parameter sweep; write CSV and manifest");
  run_cmd->add_option("--config", run.config, "JSON experiment config")->check(CLI::ExistingFile);
  run_cmd->add_option("--preset", run.preset, "Start from a named preset");
  run_cmd->add_option("--sweep", run.sweep, "name=start:stop:steps[:log]");
  auto* trials_opt = run_cmd->add_option("--trials", run.trials, "Monte Carlo trials per sweep point");
  run_cmd->add_option("--trials-per-point", run.trials, "Alias of --trials")->excludes(trials_opt);
  run_cmd->add_option("--seed", run.seed, "Master seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", run.out, "Output CSV path ('-' for stdout)");
  run_cmd->add_option("--quantities", run.quantities, "Comma-separated quantity ids");

  std::string preset_name;
  std::string preset_out;
  auto* preset_cmd = app.add_subcommand("preset", "Print a preset experiment config as JSON");
  preset_cmd->add_option("name", preset_name, "fig3|fig5|fig6|fig7|tiers|fig_s_hetnet")->required();
  preset_cmd->add_option("--out", preset_out, "Write the config here instead of stdout");

  std::string invert_config;
  double target = 0.0;
  std::string bound_id = "thm2";
  auto* invert_cmd = app.add_subcommand("invert", "Smallest BS density at which a bound reaches a target");
  invert_cmd->add_option("--config", invert_config, "Single-tier JSON config")->check(CLI::ExistingFile);
  invert_cmd->add_option("--target", target, "Target connectivity probability")->required();
  invert_cmd->add_option("--bound", bound_id, "thm1|thm1_semi_exact|thm2|thm2_small_pb|thm3|thm4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*preset_cmd) {
      const std::string text = make_manifest(preset(preset_name)).dump(2);
      if (preset_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream f(preset_out);
        if (!f) throw ConfigError("cannot write '" + preset_out + "'");
        f << text << '\n';
      }
      return 0;
    }
    if (*invert_cmd) {
      const Scenario sc = invert_config.empty() ? Scenario{default_single_tier()} : load_config(invert_config).scenario;
      const auto* single = std::get_if<SingleTierScenario>(&sc);
      if (!single) throw ConfigError("invert needs a single-tier scenario");
      std::cout << fmt::format("{}\n", invert_density(target, *single, bound_id));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeExit;
  }
  return 0;
}
