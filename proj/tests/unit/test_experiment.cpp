#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mmwave/errors.hpp"
#include "mmwave/experiment.hpp"

using namespace mmwave;

namespace {

std::string csv_of(const ExperimentConfig& cfg, unsigned workers = 0) {
  std::ostringstream os;
  write_csv(os, run_experiment(cfg, workers));
  return os.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("sweep parsing") {
  const auto s = parse_sweep("lambda_c=1e-5:2e-4:20");
  CHECK(s.param == "lambda_c");
  CHECK(s.steps == 20);
  CHECK(!s.log);
  const auto v = s.values();
  CHECK(v.front() == 1e-5);
  CHECK(v.back() == 2e-4);
  CHECK(v[1] == doctest::Approx(2e-5));
  const auto l = parse_sweep("s=1:300:15:log").values();
  CHECK(l.front() == 1.0);
  CHECK(l.back() == 300.0);
  CHECK(l[7] == doctest::Approx(std::sqrt(300.0)));
  CHECK(parse_sweep("p_b=0.3:0.3:1").values() == std::vector<double>{0.3});
  CHECK_THROWS_AS(parse_sweep("lambda_c=1:2"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("=1:2:3"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("x=1:2:0"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("x=a:2:3"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("x=0:2:3:log"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("x=1:2:3:cubic"), ConfigError);
}

TEST_CASE("config round trip through JSON") {
  for (const auto& name : preset_names()) {
    const auto cfg = preset(name);
    const auto again = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(again) == config_to_json(cfg));
  }
  CHECK_THROWS_AS(preset("fig9"), ConfigError);
}

TEST_CASE("config validation") {
  auto j = config_to_json(preset("fig5"));
  j["bogus"] = 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(preset("fig5"));
  j["quantities"] = {"thm5"};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(preset("fig5"));
  j["sweep"]["param"] = "K";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(preset("fig5"));
  j["scenario"]["p_b"] = 1.5;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(preset("fig5"));
  j["trials"] = 0;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(preset("tiers"));
  j["scenario"]["tiers"].push_back({{"lambda", 1e-3}, {"r", 10.0}});
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(preset("fig5"));
  j.erase("quantities");
  CHECK(!config_from_json(j).quantities.empty());
}

TEST_CASE("sweep application") {
  const auto single = apply_sweep(default_single_tier(), "r_over_sqrt_s", 2.0);
  CHECK(std::get<SingleTierScenario>(single).range == doctest::Approx(2 * std::sqrt(30.0)));
  const auto het = apply_sweep(default_hetnet(), "K", 2.0);
  CHECK(std::get<HetNetScenario>(het).num_tiers() == 2);
  CHECK_THROWS_AS(apply_sweep(default_hetnet(), "K", 4.0), ConfigError);
  CHECK_THROWS_AS(apply_sweep(default_hetnet(), "K", 1.5), ConfigError);
  CHECK_THROWS_AS(apply_sweep(default_single_tier(), "K", 1.0), ConfigError);
  const auto scaled = apply_sweep(default_hetnet(), "lambda_scale", 0.5);
  CHECK(std::get<HetNetScenario>(scaled).tiers[1].bs_density == doctest::Approx(1e-4));
}

TEST_CASE("CSV schema") {
  auto cfg = preset("fig5");
  cfg.sweep = SweepSpec{"lambda_c", 1e-5, 2e-4, 2, false};
  cfg.quantities = {"thm1", "sim_exact"};
  cfg.trials = 200;
  const auto rows = run_experiment(cfg);
  CHECK(rows.size() == 4);
  std::ostringstream os;
  write_csv(os, rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "sweep_param,sweep_value,quantity,value,ci_low,ci_high,trials,seed");
  std::getline(is, line);
  CHECK(line.rfind("lambda_c,1e-05,thm1,", 0) == 0);
  CHECK(line.ends_with(",,,,"));
  std::getline(is, line);
  CHECK(line.rfind("lambda_c,1e-05,sim_exact,", 0) == 0);
  CHECK(line.find(",200,") != std::string::npos);
  CHECK(!line.ends_with(","));
}

TEST_CASE("per-tier quantities expand per sweep point") {
  auto cfg = preset("tiers");
  cfg.trials = 100;
  const auto rows = run_experiment(cfg);
  int per_tier = 0;
  for (const auto& r : rows) per_tier += r.quantity.rfind("sim_per_tier_", 0) == 0;
  CHECK(per_tier == 1 + 2 + 3);
}

TEST_CASE("site-count preset") {
  const auto rows = run_experiment(preset("fig3"));
  CHECK(rows.size() == 2000);
  for (const auto& r : rows) {
    if (r.sweep_value && std::abs(*r.sweep_value - 1.5) < 1e-9 && r.quantity != "n_asym") CHECK(r.value == 9.0);
  }
}

TEST_CASE("manifest re-run is bit identical and schedule independent") {
  auto cfg = preset("fig5");
  cfg.sweep = SweepSpec{"lambda_c", 1e-5, 2e-4, 3, false};
  cfg.trials = 300;
  const std::string first = csv_of(cfg, 1);
  const auto replay = config_from_json(make_manifest(cfg));
  CHECK(csv_of(replay, 8) == first);
}

TEST_CASE("density inversion") {
  const auto sc = default_single_tier();
  CHECK(invert_density(0.0, sc, "thm2") == 0.0);
  const double lam = invert_density(0.9, sc, "thm2");
  auto check = sc;
  check.bs_density = lam;
  CHECK(std::abs(bounds::pc_lb_mbfc_dense(check).value - 0.9) < 1e-6);
  CHECK(invert_density(0.95, sc, "thm2") > lam);
  const double l1 = invert_density(0.5, sc, "thm1");
  check.bs_density = l1;
  CHECK(std::abs(bounds::pc_lb_mbfc(check).value - 0.5) < 1e-6);
  auto no_range = sc;
  no_range.range = 0.0;
  CHECK_THROWS_AS(invert_density(0.5, no_range, "thm1"), DomainError);
  CHECK_THROWS_AS(invert_density(0.5, sc, "thm5"), ConfigError);
  CHECK_THROWS_AS(invert_density(1.0, sc, "thm1"), ConfigError);
}

}
