#pragma once

// Experiment configuration, parameter sweeps and CSV/JSON result emission.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwave/monte_carlo.hpp"

namespace mmwave {

struct SweepSpec {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;
  bool log = false;

  std::vector<double> values() const;
};

/// Parses "name=a:b:n" or "name=a:b:n:log".
SweepSpec parse_sweep(const std::string& text);

struct ExperimentConfig {
  Scenario scenario;
  std::vector<std::string> quantities;
  std::optional<SweepSpec> sweep;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  std::string out;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
/// A complete config; feeding it back to config_from_json gives the same run.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Sweep parameters accepted by the scenario kind.
std::vector<std::string> sweep_params(const Scenario& scenario);
Scenario apply_sweep(const Scenario& base, const std::string& param, double value);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);
/// Default scenarios, matching configs/defaults.json and configs/hetnet_defaults.json.
SingleTierScenario default_single_tier();
HetNetScenario default_hetnet();

struct ResultRow {
  std::string sweep_param;
  std::optional<double> sweep_value;
  std::string quantity;
  double value = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
};

/// Seed used for the simulated quantities at sweep point `index`.
std::uint64_t point_seed(std::uint64_t master, std::size_t index);

/// Evaluates every quantity at every sweep point, in sweep order.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, unsigned workers = 0);

inline constexpr const char* kCsvHeader = "sweep_param,sweep_value,quantity,value,ci_low,ci_high,trials,seed";
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);

nlohmann::json make_manifest(const ExperimentConfig& config);

/// Bisection on lambda_c so that the named single-tier bound meets target_pc.
double invert_density(double target_pc, const SingleTierScenario& scenario, const std::string& bound_id);

const char* toolkit_version();

}  // namespace mmwave
