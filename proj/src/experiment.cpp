#include "mmwave/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "mmwave/errors.hpp"

#ifndef MMWAVE_VERSION
#define MMWAVE_VERSION "0.0.0"
#endif

namespace mmwave {

using nlohmann::json;

namespace {

const std::vector<std::string> kSingleAnalytic = {"thm1", "thm1_semi_exact", "thm2", "thm2_small_pb", "thm3", "thm4",
                                                  "n_minus", "n_plus", "n_exact", "n_asym", "n_minus_ru", "n_plus_ru"};
const std::vector<std::string> kSingleSim = {"sim_exact", "sim_mbfc", "sim_multiregion", "sim_exact_random_user"};
// Ids ending in "_k" expand to one quantity per tier.
const std::vector<std::string> kHetNetAnalytic = {"qk", "cor1", "cor2", "thm5", "thm6",
                                                  "thm7", "thm8", "thm8_tight", "thm8_linear"};
const std::vector<std::string> kHetNetSim = {"sim_exact_hetnet", "sim_per_tier", "sim_mbfc_hetnet",
                                             "sim_multiregion_hetnet", "sim_exact_hetnet_random_user"};
const std::set<std::string> kPerTierIds = {"qk", "cor1", "cor2", "sim_per_tier"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

bool is_sim(const std::string& q) { return q.rfind("sim_", 0) == 0; }

void check_quantities(const Scenario& sc, const std::vector<std::string>& quantities) {
  if (quantities.empty()) throw ConfigError("no quantities requested");
  const bool het = std::holds_alternative<HetNetScenario>(sc);
  for (const auto& q : quantities) {
    const bool ok = het ? contains(kHetNetAnalytic, q) || contains(kHetNetSim, q)
                        : contains(kSingleAnalytic, q) || contains(kSingleSim, q);
    if (!ok) throw ConfigError("unknown quantity '" + q + "' for a " + (het ? "hetnet" : "single-tier") + " scenario");
  }
}

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing config field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown field '" + key + "' in " + where);
    }
  }
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be an object");
  const auto type = get_field<std::string>(j, "type");
  if (type == "single") {
    reject_unknown(j, {"type", "site_area", "p_b", "lambda_c", "r_b"}, "scenario");
    SingleTierScenario sc{{get_field<double>(j, "site_area"), get_field<double>(j, "p_b")},
                          get_field<double>(j, "lambda_c"),
                          get_field<double>(j, "r_b")};
    sc.validate();
    return sc;
  }
  if (type == "hetnet") {
    reject_unknown(j, {"type", "site_area", "height_probs", "tiers"}, "scenario");
    HetNetScenario sc;
    sc.lattice = {get_field<double>(j, "site_area"), get_field<std::vector<double>>(j, "height_probs")};
    const json tiers = get_field<json>(j, "tiers");
    if (!tiers.is_array()) throw ConfigError("tiers must be an array");
    for (const auto& t : tiers) {
      reject_unknown(t, {"lambda", "r"}, "tier");
      sc.tiers.push_back({get_field<double>(t, "lambda"), get_field<double>(t, "r")});
    }
    (void)sc.validate();
    return sc;
  }
  throw ConfigError("scenario type must be 'single' or 'hetnet', got '" + type + "'");
}

json scenario_to_json(const Scenario& scenario) {
  if (const auto* s = std::get_if<SingleTierScenario>(&scenario)) {
    return {{"type", "single"},
            {"site_area", s->lattice.site_area},
            {"p_b", s->lattice.occupancy},
            {"lambda_c", s->bs_density},
            {"r_b", s->range}};
  }
  const auto& h = std::get<HetNetScenario>(scenario);
  json tiers = json::array();
  for (const Tier& t : h.tiers) tiers.push_back({{"lambda", t.bs_density}, {"r", t.range}});
  return {{"type", "hetnet"}, {"site_area", h.lattice.site_area}, {"height_probs", h.lattice.height_probs},
          {"tiers", tiers}};
}

std::vector<std::string> default_quantities(const Scenario& sc) {
  if (std::holds_alternative<HetNetScenario>(sc)) {
    return {"cor1", "thm5", "thm7", "thm8", "sim_exact_hetnet", "sim_per_tier"};
  }
  return {"thm1", "thm1_semi_exact", "thm2", "thm3", "thm4", "sim_exact", "sim_mbfc", "sim_multiregion"};
}

double single_analytic(const SingleTierScenario& sc, const std::string& q) {
  const double r = sc.range;
  const double s = sc.lattice.site_area;
  if (q == "thm1") return bounds::pc_lb_mbfc(sc).value;
  if (q == "thm1_semi_exact") return bounds::pc_mbfc_semi_exact(sc).value;
  if (q == "thm2") return bounds::pc_lb_mbfc_dense(sc).value;
  if (q == "thm2_small_pb") return bounds::pc_lb_mbfc_dense(sc, true).value;
  if (q == "thm3") return bounds::pc_lb_multiregion(sc).value;
  if (q == "thm4") return bounds::pc_lb_multiregion_dense(sc).value;
  if (q == "n_minus") return static_cast<double>(bounds::n_bounds(r, s).lower);
  if (q == "n_plus") return static_cast<double>(bounds::n_bounds(r, s).upper);
  if (q == "n_exact") return static_cast<double>(exact_covered_site_count(r, s));
  if (q == "n_asym") return bounds::n_asymptotic(r, s);
  if (q == "n_minus_ru") return static_cast<double>(bounds::n_bounds_random_user(r, s).lower);
  if (q == "n_plus_ru") return static_cast<double>(bounds::n_bounds_random_user(r, s).upper);
  throw ConfigError("unknown quantity '" + q + "'");
}

double hetnet_analytic(const HetNetScenario& sc, const std::string& q, int k) {
  if (q == "qk") return bounds::qk(sc.lattice, k);
  if (q == "cor1") return bounds::tier_eta(sc, k).value;
  if (q == "cor2") return bounds::tier_eta_dense(sc, k).value;
  if (q == "thm5") return bounds::hetnet_lb_max(sc).value;
  if (q == "thm6") return bounds::hetnet_lb_max(sc, true).value;
  if (q == "thm7") return bounds::hetnet_lb_multiregion(sc).value;
  if (q == "thm8") return bounds::hetnet_lb_independent(sc).value;
  if (q == "thm8_tight") return bounds::hetnet_lb_independent(sc, true).value;
  if (q == "thm8_linear") return *bounds::hetnet_lb_independent(sc).linear_sum;
  throw ConfigError("unknown quantity '" + q + "'");
}

struct SimRequest {
  std::string quantity;
  EstimatorSpec spec;
};

std::vector<SimRequest> sim_requests(const std::string& q, int num_tiers) {
  if (q == "sim_exact" || q == "sim_exact_random_user") return {{q, {EstimatorKind::kExactSingle}}};
  if (q == "sim_mbfc") return {{q, {EstimatorKind::kMbfcSingle}}};
  if (q == "sim_multiregion") return {{q, {EstimatorKind::kMultiRegionSingle}}};
  if (q == "sim_exact_hetnet" || q == "sim_exact_hetnet_random_user") return {{q, {EstimatorKind::kExactHetNet}}};
  if (q == "sim_mbfc_hetnet") return {{q, {EstimatorKind::kMbfcHetNet}}};
  if (q == "sim_multiregion_hetnet") return {{q, {EstimatorKind::kMultiRegionHetNet}}};
  if (q == "sim_per_tier") {
    std::vector<SimRequest> out;
    for (int k = 1; k <= num_tiers; ++k) out.push_back({q + "_" + std::to_string(k), {EstimatorKind::kPerTier, k}});
    return out;
  }
  throw ConfigError("unknown quantity '" + q + "'");
}

bool is_random_user(const std::string& q) { return q.ends_with("_random_user"); }

int num_tiers_of(const Scenario& sc) {
  if (const auto* h = std::get_if<HetNetScenario>(&sc)) return h->num_tiers();
  return 1;
}

std::string format_double(double v) { return fmt::format("{}", v); }

using BoundFn = double (*)(const SingleTierScenario&);

BoundFn bound_by_id(const std::string& id) {
  if (id == "thm1") return [](const SingleTierScenario& sc) { return bounds::pc_lb_mbfc(sc).value; };
  if (id == "thm1_semi_exact") return [](const SingleTierScenario& sc) { return bounds::pc_mbfc_semi_exact(sc).value; };
  if (id == "thm2") return [](const SingleTierScenario& sc) { return bounds::pc_lb_mbfc_dense(sc).value; };
  if (id == "thm2_small_pb") {
    return [](const SingleTierScenario& sc) { return bounds::pc_lb_mbfc_dense(sc, true).value; };
  }
  if (id == "thm3") return [](const SingleTierScenario& sc) { return bounds::pc_lb_multiregion(sc).value; };
  if (id == "thm4") return [](const SingleTierScenario& sc) { return bounds::pc_lb_multiregion_dense(sc).value; };
  throw ConfigError("cannot invert bound '" + id + "'");
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  if (steps < 1) throw ConfigError("sweep needs at least one step");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw ConfigError("sweep bounds must be finite");
  if (log && !(start > 0.0 && stop > 0.0)) throw ConfigError("log sweep needs positive bounds");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    out[static_cast<std::size_t>(i)] =
        log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start))) : start + t * (stop - start);
  }
  out.front() = start;
  if (steps > 1) out.back() = stop;
  return out;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("sweep must look like name=a:b:n[:log], got '" + text + "'");
  SweepSpec spec;
  spec.param = text.substr(0, eq);
  std::vector<std::string> parts;
  std::size_t pos = eq + 1;
  while (true) {
    const auto colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() < 3 || parts.size() > 4) throw ConfigError("sweep must look like name=a:b:n[:log]");
  try {
    std::size_t used = 0;
    spec.start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    spec.stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    spec.steps = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("steps");
  } catch (const std::logic_error&) {
    throw ConfigError("malformed number in sweep '" + text + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      spec.log = true;
    } else if (parts[3] != "lin") {
      throw ConfigError("sweep scale must be 'log' or 'lin'");
    }
  }
  (void)spec.values();
  return spec;
}

std::vector<std::string> sweep_params(const Scenario& scenario) {
  if (std::holds_alternative<HetNetScenario>(scenario)) return {"K", "s", "lambda_scale"};
  return {"lambda_c", "r_b", "s", "p_b", "r_over_sqrt_s"};
}

Scenario apply_sweep(const Scenario& base, const std::string& param, double value) {
  if (!contains(sweep_params(base), param)) throw ConfigError("unknown sweep parameter '" + param + "'");
  if (auto single = std::get_if<SingleTierScenario>(&base)) {
    SingleTierScenario sc = *single;
    if (param == "lambda_c") sc.bs_density = value;
    if (param == "r_b") sc.range = value;
    if (param == "s") sc.lattice.site_area = value;
    if (param == "p_b") sc.lattice.occupancy = value;
    if (param == "r_over_sqrt_s") sc.range = value * std::sqrt(sc.lattice.site_area);
    sc.validate();
    return sc;
  }
  HetNetScenario sc = std::get<HetNetScenario>(base);
  if (param == "K") {
    const double k = std::round(value);
    if (std::abs(k - value) > 1e-9 || k < 1 || k > sc.num_tiers()) {
      throw ConfigError("K must be an integer in 1.." + std::to_string(sc.num_tiers()));
    }
    sc.tiers.resize(static_cast<std::size_t>(k));
  }
  if (param == "s") sc.lattice.site_area = value;
  if (param == "lambda_scale") {
    for (Tier& t : sc.tiers) t.bs_density *= value;
  }
  (void)sc.validate();
  return sc;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"scenario", "quantities", "sweep", "trials", "seed", "out", "toolkit_version"}, "config");
  ExperimentConfig cfg;
  cfg.scenario = scenario_from_json(get_field<json>(j, "scenario"));
  cfg.quantities = j.contains("quantities") ? get_field<std::vector<std::string>>(j, "quantities")
                                            : default_quantities(cfg.scenario);
  check_quantities(cfg.scenario, cfg.quantities);
  if (j.contains("sweep") && !j.at("sweep").is_null()) {
    const json& sw = j.at("sweep");
    reject_unknown(sw, {"param", "start", "stop", "steps", "log"}, "sweep");
    SweepSpec spec{get_field<std::string>(sw, "param"), get_field<double>(sw, "start"), get_field<double>(sw, "stop"),
                   get_field<int>(sw, "steps"), sw.contains("log") ? get_field<bool>(sw, "log") : false};
    if (!contains(sweep_params(cfg.scenario), spec.param)) {
      throw ConfigError("unknown sweep parameter '" + spec.param + "'");
    }
    (void)spec.values();
    cfg.sweep = spec;
  }
  if (j.contains("trials")) cfg.trials = get_field<std::int64_t>(j, "trials");
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("out")) cfg.out = get_field<std::string>(j, "out");
  return cfg;
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["scenario"] = scenario_to_json(config.scenario);
  j["quantities"] = config.quantities;
  if (config.sweep) {
    const SweepSpec& s = *config.sweep;
    j["sweep"] = {{"param", s.param}, {"start", s.start}, {"stop", s.stop}, {"steps", s.steps}, {"log", s.log}};
  } else {
    j["sweep"] = nullptr;
  }
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["out"] = config.out;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

SingleTierScenario default_single_tier() { return {{30.0, 0.3}, 6e-5, 150.0}; }

HetNetScenario default_hetnet() {
  HetNetScenario sc;
  sc.lattice = {30.0, {0.4, 0.1, 0.2, 0.3}};
  sc.tiers = {{4e-5, 150.0}, {2e-4, 90.0}, {4e-4, 50.0}};
  return sc;
}

std::vector<std::string> preset_names() { return {"fig3", "fig5", "fig6", "fig7", "tiers", "fig_s_hetnet"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.scenario = default_single_tier();
  cfg.quantities = default_quantities(cfg.scenario);
  cfg.seed = 42;
  cfg.out = name + ".csv";
  if (name == "fig3") {
    cfg.quantities = {"n_minus", "n_plus", "n_exact", "n_asym"};
    cfg.sweep = SweepSpec{"r_over_sqrt_s", 0.1, 50.0, 500, false};
  } else if (name == "fig5") {
    cfg.sweep = SweepSpec{"lambda_c", 1e-5, 2e-4, 20, false};
  } else if (name == "fig6") {
    cfg.sweep = SweepSpec{"p_b", 0.05, 0.95, 19, false};
  } else if (name == "fig7") {
    cfg.sweep = SweepSpec{"s", 1.0, 300.0, 15, true};
  } else if (name == "tiers") {
    cfg.scenario = default_hetnet();
    cfg.quantities = {"cor1", "thm5", "thm7", "thm8", "sim_exact_hetnet", "sim_per_tier"};
    cfg.sweep = SweepSpec{"K", 1.0, 3.0, 3, false};
  } else if (name == "fig_s_hetnet") {
    cfg.scenario = default_hetnet();
    cfg.quantities = {"thm5", "thm7", "thm8", "sim_exact_hetnet"};
    cfg.sweep = SweepSpec{"s", 1.0, 300.0, 15, true};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return cfg;
}

std::uint64_t point_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, unsigned workers) {
  check_quantities(config.scenario, config.quantities);
  if (config.trials < 1) throw ConfigError("trials must be at least 1");
  const std::string param = config.sweep ? config.sweep->param : "none";
  const std::vector<double> points = config.sweep ? config.sweep->values() : std::vector<double>{0.0};

  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Scenario sc = config.sweep ? apply_sweep(config.scenario, param, points[i]) : config.scenario;
    const int tiers = num_tiers_of(sc);
    const std::uint64_t seed = point_seed(config.seed, i);
    const std::optional<double> sweep_value =
        config.sweep ? std::optional<double>(points[i]) : std::nullopt;

    std::vector<SimRequest> origin;
    std::vector<SimRequest> random_user;
    for (const auto& q : config.quantities) {
      if (!is_sim(q)) continue;
      for (auto& r : sim_requests(q, tiers)) (is_random_user(q) ? random_user : origin).push_back(std::move(r));
    }
    std::vector<std::pair<std::string, Estimate>> sims;
    for (const auto* group : {&origin, &random_user}) {
      if (group->empty()) continue;
      RunOptions options;
      options.workers = workers;
      if (group == &random_user) options.placement = UserPlacement::kUniformInEmptySite;
      std::vector<EstimatorSpec> specs;
      for (const auto& r : *group) specs.push_back(r.spec);
      const auto est = estimate_all(specs, sc, config.trials, seed, options);
      for (std::size_t k = 0; k < est.size(); ++k) sims.emplace_back((*group)[k].quantity, est[k]);
    }

    for (const auto& q : config.quantities) {
      if (is_sim(q)) {
        for (const auto& [id, e] : sims) {
          if (id == q || (kPerTierIds.contains(q) && id.rfind(q + "_", 0) == 0)) {
            rows.push_back({param, sweep_value, id, e.p_hat, e.ci_low, e.ci_high, e.trials, seed});
          }
        }
        continue;
      }
      if (const auto* single = std::get_if<SingleTierScenario>(&sc)) {
        rows.push_back({param, sweep_value, q, single_analytic(*single, q), {}, {}, {}, {}});
        continue;
      }
      const auto& het = std::get<HetNetScenario>(sc);
      if (kPerTierIds.contains(q)) {
        for (int k = 1; k <= tiers; ++k) {
          rows.push_back({param, sweep_value, q + "_" + std::to_string(k), hetnet_analytic(het, q, k), {}, {}, {}, {}});
        }
      } else {
        rows.push_back({param, sweep_value, q, hetnet_analytic(het, q, 1), {}, {}, {}, {}});
      }
    }
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.sweep_param << ',' << (r.sweep_value ? format_double(*r.sweep_value) : "") << ',' << r.quantity << ','
       << format_double(r.value) << ',' << (r.ci_low ? format_double(*r.ci_low) : "") << ','
       << (r.ci_high ? format_double(*r.ci_high) : "") << ',' << (r.trials ? std::to_string(*r.trials) : "") << ','
       << (r.seed ? std::to_string(*r.seed) : "") << '\n';
  }
}

json make_manifest(const ExperimentConfig& config) {
  json j = config_to_json(config);
  j["toolkit_version"] = toolkit_version();
  return j;
}

double invert_density(double target_pc, const SingleTierScenario& scenario, const std::string& bound_id) {
  const BoundFn f = bound_by_id(bound_id);
  if (!(target_pc >= 0.0 && target_pc < 1.0)) throw ConfigError("target p_c must lie in [0, 1)");
  if (target_pc == 0.0) return 0.0;
  SingleTierScenario sc = scenario;
  auto at = [&](double lambda) {
    sc.bs_density = lambda;
    return f(sc);
  };
  double lo = 0.0;
  double hi = 1e-6;
  while (at(hi) < target_pc) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw DomainError(fmt::format("target {} is above the supremum of {} over lambda_c", target_pc, bound_id));
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) < target_pc ? lo : hi) = mid;
  }
  return std::abs(at(lo) - target_pc) <= std::abs(at(hi) - target_pc) ? lo : hi;
}

const char* toolkit_version() { return MMWAVE_VERSION; }

}  // namespace mmwave
