#include "mmwave/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "mmwave/errors.hpp"

namespace mmwave {

namespace {

struct KindName {
  EstimatorKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {EstimatorKind::kExactSingle, "exact_single"},
    {EstimatorKind::kMbfcSingle, "mbfc_single"},
    {EstimatorKind::kMultiRegionSingle, "multiregion_single"},
    {EstimatorKind::kRPmf, "r_pmf"},
    {EstimatorKind::kExactHetNet, "exact_hetnet"},
    {EstimatorKind::kPerTier, "per_tier"},
    {EstimatorKind::kMbfcHetNet, "mbfc_hetnet"},
    {EstimatorKind::kMultiRegionHetNet, "multiregion_hetnet"},
};

bool is_hetnet(const Scenario& sc) { return std::holds_alternative<HetNetScenario>(sc); }

double site_area_of(const Scenario& sc) {
  return std::visit([](const auto& s) { return s.lattice.site_area; }, sc);
}

std::vector<Tier> tiers_of(const Scenario& sc) {
  if (const auto* single = std::get_if<SingleTierScenario>(&sc)) return {{single->bs_density, single->range}};
  return std::get<HetNetScenario>(sc).tiers;
}

void validate_scenario(const Scenario& sc) {
  std::visit([](const auto& s) { (void)s.validate(); }, sc);
}

int tier_cap(double range, double site_area, const RunOptions& options) {
  return std::max(mbfc_cap_for_range(range, site_area), options.pmf_n_max);
}

double norm2(Point p) { return p.x * p.x + p.y * p.y; }

}  // namespace

std::string to_string(EstimatorKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
  for (const auto& entry : kKindNames) {
    if (name == entry.name) return entry.kind;
  }
  throw ConfigError("unknown estimator '" + name + "'");
}

bool is_hetnet_kind(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kExactHetNet:
    case EstimatorKind::kPerTier:
    case EstimatorKind::kMbfcHetNet:
    case EstimatorKind::kMultiRegionHetNet:
      return true;
    default:
      return false;
  }
}

std::string EstimatorSpec::id() const {
  if (kind == EstimatorKind::kPerTier) return "per_tier_" + std::to_string(tier);
  if (kind == EstimatorKind::kRPmf) return "r_pmf_" + std::to_string(bucket);
  return to_string(kind);
}

bool TrialOutcome::any_exact() const {
  return std::any_of(tiers.begin(), tiers.end(), [](const TierOutcome& t) { return t.exact; });
}

bool TrialOutcome::any_mbfc() const {
  return std::any_of(tiers.begin(), tiers.end(), [](const TierOutcome& t) { return t.mbfc; });
}

bool TrialOutcome::any_multiregion() const {
  return std::any_of(tiers.begin(), tiers.end(), [](const TierOutcome& t) { return t.multiregion; });
}

Window simulation_window(const Scenario& scenario, const RunOptions& options) {
  const double s = site_area_of(scenario);
  const double side = std::sqrt(s);
  double reach = 0.0;
  for (const Tier& t : tiers_of(scenario)) reach = std::max(reach, t.range);
  if (options.pmf_n_max >= 0) reach = std::max(reach, mbfc_radius(options.pmf_n_max, s));
  const double margin = options.placement == UserPlacement::kOrigin ? side : 2.0 * side;
  return {reach + margin};
}

void check_compatible(const EstimatorSpec& spec, const Scenario& scenario, const RunOptions& options) {
  if (is_hetnet_kind(spec.kind) != is_hetnet(scenario)) {
    throw ConfigError("estimator " + to_string(spec.kind) + " needs a " +
                      (is_hetnet_kind(spec.kind) ? "hetnet" : "single-tier") + " scenario");
  }
  if (spec.kind == EstimatorKind::kPerTier) {
    const auto k = static_cast<int>(tiers_of(scenario).size());
    if (spec.tier < 1 || spec.tier > k) throw ConfigError("per_tier tier index out of range");
  }
  if (spec.kind == EstimatorKind::kRPmf) {
    if (options.pmf_n_max < 0) throw ConfigError("r_pmf needs pmf_n_max >= 0");
    if (spec.bucket < 0 || spec.bucket > options.pmf_n_max) throw ConfigError("r_pmf bucket out of range");
  }
  if (options.placement == UserPlacement::kUniformInEmptySite) {
    const bool exact_kind = spec.kind == EstimatorKind::kExactSingle || spec.kind == EstimatorKind::kExactHetNet ||
                            spec.kind == EstimatorKind::kPerTier;
    if (!exact_kind) throw ConfigError("random user placement supports exact estimators only");
  }
}

TrialOutcome evaluate_trial(const Scenario& scenario, const RunOptions& options, const LatticeRealization& lattice,
                            const std::vector<PointSet>& bss, Point user) {
  const std::vector<Tier> tiers = tiers_of(scenario);
  if (bss.size() != tiers.size()) throw ConfigError("need one PPP per tier");
  const double s = lattice.site_area();
  const double half = lattice.window().half_width * (1.0 + 1e-12);
  const bool at_origin = options.placement == UserPlacement::kOrigin;

  TrialOutcome out;
  out.tiers.resize(tiers.size());
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    const Tier& tier = tiers[k];
    TierOutcome& res = out.tiers[k];
    if (std::max(std::abs(user.x), std::abs(user.y)) + tier.range + lattice.site_side() > half) {
      throw WindowError("window half width must be at least range + sqrt(s) around the user");
    }
    const SiteSet blocking = blocking_sites_for_tier(lattice, static_cast<int>(k) + 1);
    const double range2 = tier.range * tier.range;

    if (!at_origin) {
      for (const Point& p : bss[k].points) {
        const Point rel{p.x - user.x, p.y - user.y};
        if (norm2(rel) > range2) continue;
        if (!segment_blocked({user, p}, blocking, s)) {
          res.exact = true;
          break;
        }
      }
      continue;
    }

    const int cap = tier_cap(tier.range, s, options);
    res.region_index = region_mbfc_indices(lattice, blocking, cap);
    res.mbfc_index = *std::min_element(res.region_index.begin() + 1, res.region_index.end());
    const double mbfc_r = std::min(mbfc_radius(res.mbfc_index, s), tier.range);

    for (const Point& p : bss[k].points) {
      const double d2 = norm2(p);
      if (d2 > range2) continue;
      if (d2 <= mbfc_r * mbfc_r) res.mbfc = true;
      const RegionId region = region_of_site(site_of_point(p, s));
      if (region == 0) {
        res.multiregion = true;
      } else {
        const double rr = mbfc_radius(res.region_index[static_cast<std::size_t>(region)], s);
        if (d2 <= rr * rr) res.multiregion = true;
      }
      // a BS inside the clear disk is in LoS by construction
      if (!res.exact) res.exact = d2 <= mbfc_r * mbfc_r || !segment_blocked({{0.0, 0.0}, p}, blocking, s);
      if (res.mbfc && res.multiregion && res.exact) break;
    }
  }
  return out;
}

TrialOutcome simulate_trial(const Scenario& scenario, const RunOptions& options, Engine& eng) {
  const Window window = simulation_window(scenario, options);
  const std::vector<Tier> tiers = tiers_of(scenario);
  const LatticeRealization lattice = std::visit(
      [&](const auto& sc) {
        if constexpr (std::is_same_v<std::decay_t<decltype(sc)>, SingleTierScenario>) {
          return sample_uniform_lattice(sc.lattice, window, eng);
        } else {
          return sample_multiheight_lattice(sc.lattice, window, eng);
        }
      },
      scenario);
  std::vector<PointSet> bss;
  bss.reserve(tiers.size());
  for (const Tier& t : tiers) bss.push_back(sample_ppp(t.bs_density, window, eng));
  Point user{};
  if (options.placement == UserPlacement::kUniformInEmptySite) {
    const double side = lattice.site_side();
    user.x = (uniform01(eng) - 0.5) * side;
    user.y = (uniform01(eng) - 0.5) * side;
  }
  return evaluate_trial(scenario, options, lattice, bss, user);
}

bool outcome_success(const EstimatorSpec& spec, const TrialOutcome& outcome, const RunOptions& options) {
  switch (spec.kind) {
    case EstimatorKind::kExactSingle:
      return outcome.tiers.front().exact;
    case EstimatorKind::kMbfcSingle:
      return outcome.tiers.front().mbfc;
    case EstimatorKind::kMultiRegionSingle:
      return outcome.tiers.front().multiregion;
    case EstimatorKind::kRPmf:
      return std::min(outcome.tiers.front().mbfc_index, options.pmf_n_max) == spec.bucket;
    case EstimatorKind::kExactHetNet:
      return outcome.any_exact();
    case EstimatorKind::kPerTier:
      return outcome.tiers.at(static_cast<std::size_t>(spec.tier - 1)).exact;
    case EstimatorKind::kMbfcHetNet:
      return outcome.any_mbfc();
    case EstimatorKind::kMultiRegionHetNet:
      return outcome.any_multiregion();
  }
  return false;
}

bool run_trial(const EstimatorSpec& spec, const Scenario& scenario, Engine& eng, const RunOptions& options) {
  validate_scenario(scenario);
  check_compatible(spec, scenario, options);
  return outcome_success(spec, simulate_trial(scenario, options, eng), options);
}

std::pair<double, double> wilson_ci(std::int64_t successes, std::int64_t trials, double level) {
  if (trials < 1 || successes < 0 || successes > trials) throw ConfigError("wilson_ci needs 0 <= successes <= trials");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  double low = successes == 0 ? 0.0 : std::clamp(center - half, 0.0, p);
  double high = successes == trials ? 1.0 : std::clamp(center + half, p, 1.0);
  return {low, high};
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MMWAVE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    if (end == env || *end != '\0' || v < 0) throw ConfigError("MMWAVE_THREADS must be a non-negative integer");
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<Estimate> estimate_all(const std::vector<EstimatorSpec>& specs, const Scenario& scenario,
                                   std::int64_t trials, std::uint64_t master_seed, RunOptions options) {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  validate_scenario(scenario);
  for (const auto& spec : specs) check_compatible(spec, scenario, options);

  const RngStream stream(master_seed);
  constexpr std::int64_t kChunk = 256;
  const std::int64_t chunks = (trials + kChunk - 1) / kChunk;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::int64_t>(resolve_workers(options.workers), chunks));

  std::vector<std::int64_t> totals(specs.size(), 0);
  std::mutex merge;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;

  auto work = [&] {
    std::vector<std::int64_t> local(specs.size(), 0);
    try {
      for (std::int64_t c = next++; c < chunks; c = next++) {
        const std::int64_t end = std::min(trials, (c + 1) * kChunk);
        for (std::int64_t t = c * kChunk; t < end; ++t) {
          Engine eng = stream.substream(static_cast<std::uint64_t>(t));
          const TrialOutcome outcome = simulate_trial(scenario, options, eng);
          for (std::size_t i = 0; i < specs.size(); ++i) local[i] += outcome_success(specs[i], outcome, options);
        }
      }
    } catch (...) {
      next = chunks;
      const std::lock_guard lock(merge);
      if (!failure) failure = std::current_exception();
      return;
    }
    const std::lock_guard lock(merge);
    for (std::size_t i = 0; i < specs.size(); ++i) totals[i] += local[i];
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Estimate> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto [low, high] = wilson_ci(totals[i], trials);
    out.push_back({static_cast<double>(totals[i]) / static_cast<double>(trials), trials, totals[i], low, high,
                   master_seed, specs[i].id()});
  }
  return out;
}

Estimate estimate(const EstimatorSpec& spec, const Scenario& scenario, std::int64_t trials, std::uint64_t master_seed,
                  const RunOptions& options) {
  return estimate_all({spec}, scenario, trials, master_seed, options).front();
}

std::vector<Estimate> estimate_pmf(const SingleTierScenario& scenario, int n_max, std::int64_t trials,
                                   std::uint64_t master_seed, RunOptions options) {
  if (n_max < 0) throw ConfigError("n_max must be non-negative");
  options.pmf_n_max = n_max;
  std::vector<EstimatorSpec> specs;
  for (int n = 0; n <= n_max; ++n) specs.push_back({EstimatorKind::kRPmf, 1, n});
  return estimate_all(specs, scenario, trials, master_seed, options);
}

}  // namespace mmwave
