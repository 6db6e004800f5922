#pragma once

// Seeded Monte Carlo estimators of the connectivity events.
//
// One trial samples the lattice, then one PPP per tier (tier 1 first), then the
// user offset when the user is placed at random. Every requested estimator is
// evaluated on that same draw, so outcomes of different estimators are paired.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmwave/bounds.hpp"
#include "mmwave/geometry.hpp"
#include "mmwave/lattice.hpp"
#include "mmwave/rng.hpp"

namespace mmwave {

using Scenario = std::variant<SingleTierScenario, HetNetScenario>;

enum class EstimatorKind {
  kExactSingle,
  kMbfcSingle,
  kMultiRegionSingle,
  kRPmf,
  kExactHetNet,
  kPerTier,
  kMbfcHetNet,
  kMultiRegionHetNet,
};

enum class UserPlacement { kOrigin, kUniformInEmptySite };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);
bool is_hetnet_kind(EstimatorKind kind);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kExactSingle;
  int tier = 1;    // kPerTier only
  int bucket = 0;  // kRPmf only: Pr(R = r_bucket), or the tail when bucket == pmf_n_max

  /// Stable id, e.g. "exact_single", "per_tier_2", "r_pmf_0".
  std::string id() const;
};

struct RunOptions {
  UserPlacement placement = UserPlacement::kOrigin;
  /// Highest MBFC index resolved for kRPmf; -1 when no PMF is requested.
  int pmf_n_max = -1;
  /// 0 defers to MMWAVE_THREADS, then to the hardware.
  unsigned workers = 0;
};

struct Estimate {
  double p_hat = 0.0;
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t master_seed = 0;
  std::string estimator_id;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct TierOutcome {
  bool exact = false;
  bool mbfc = false;
  bool multiregion = false;
  int mbfc_index = 0;  // capped at max(range cap, pmf_n_max)
  std::array<int, kNumRegions + 1> region_index{};
};

struct TrialOutcome {
  std::vector<TierOutcome> tiers;

  bool any_exact() const;
  bool any_mbfc() const;
  bool any_multiregion() const;
};

/// Window half width used for a scenario: max range + sqrt(s), widened for the
/// PMF cap and by one more site when the user is placed at random.
Window simulation_window(const Scenario& scenario, const RunOptions& options);

/// Evaluates every event of one trial on given realizations. `bss[k-1]` is the
/// tier-k PPP and `user` the user position (the origin for kOrigin).
TrialOutcome evaluate_trial(const Scenario& scenario, const RunOptions& options, const LatticeRealization& lattice,
                            const std::vector<PointSet>& bss, Point user);

/// Samples one trial from `eng` and evaluates it.
TrialOutcome simulate_trial(const Scenario& scenario, const RunOptions& options, Engine& eng);

bool outcome_success(const EstimatorSpec& spec, const TrialOutcome& outcome, const RunOptions& options);

/// Throws ConfigError when the estimator cannot run on this scenario.
void check_compatible(const EstimatorSpec& spec, const Scenario& scenario, const RunOptions& options);

bool run_trial(const EstimatorSpec& spec, const Scenario& scenario, Engine& eng, const RunOptions& options = {});

Estimate estimate(const EstimatorSpec& spec, const Scenario& scenario, std::int64_t trials, std::uint64_t master_seed,
                  const RunOptions& options = {});

/// All estimators on shared trials 0..trials-1 under `master_seed`.
std::vector<Estimate> estimate_all(const std::vector<EstimatorSpec>& specs, const Scenario& scenario,
                                   std::int64_t trials, std::uint64_t master_seed, RunOptions options = {});

/// Buckets R = r_0, ..., r_{n_max-1} and the tail R >= r_{n_max}.
std::vector<Estimate> estimate_pmf(const SingleTierScenario& scenario, int n_max, std::int64_t trials,
                                   std::uint64_t master_seed, RunOptions options = {});

std::pair<double, double> wilson_ci(std::int64_t successes, std::int64_t trials, double level = 0.95);

/// Worker count for `requested` (0 = MMWAVE_THREADS, then hardware).
unsigned resolve_workers(unsigned requested);

}  // namespace mmwave
