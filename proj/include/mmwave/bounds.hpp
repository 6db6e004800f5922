#pragma once

// Closed-form connectivity bounds for a user at the origin of a random lattice
// of buildings with Poisson base stations.
//
// Conventions shared by every bound:
//  - powers of the void probability are formed in log space with 0^0 = 1;
//  - MBFC sums run over radii r_n strictly below the BS range, so every sum is
//    empty when r_b <= sqrt(s)/2;
//  - results within 1e-12 of [0, 1] are clamped, anything further throws.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmwave/lattice.hpp"

namespace mmwave {

struct SingleTierScenario {
  LatticeConfig lattice;
  double bs_density = 0.0;  // lambda_c, 1/m^2
  double range = 0.0;       // r_b, m

  void validate() const;
};

struct Tier {
  double bs_density = 0.0;
  double range = 0.0;
};

struct HetNetScenario {
  MultiHeightConfig lattice;
  std::vector<Tier> tiers;  // tier k is blocked by height classes 1..k

  int num_tiers() const { return static_cast<int>(tiers.size()); }
  /// Throws on hard errors; returns human-readable warnings for orderings the
  /// model assumes (decreasing ranges, increasing densities) but does not need.
  std::vector<std::string> validate() const;
};

enum class BoundId {
  kMbfc,              // single-disk bound
  kMbfcSemiExact,     // the same MBFC expectation with exact site counts
  kMbfcDense,         // dense-site closed form
  kMbfcDenseSmallPb,  // dense-site form with ln(1/(1-p)) ~ p
  kMultiRegion,       // eight-region product
  kMultiRegionDense,  // four-quadrant dense form
  kTierEta,
  kTierEtaDense,
  kHetNetMax,
  kHetNetMaxDense,
  kHetNetMultiRegion,
  kHetNetIndependent,
  kHetNetIndependentTight,
};

std::string to_string(BoundId id);

struct BoundResult {
  double value = 0.0;
  BoundId id = BoundId::kMbfc;
  std::vector<double> terms;         // addends or per-tier values, bound-specific
  std::optional<int> argmax_tier;    // set by the max-over-tiers bounds (1-based)
  std::optional<double> linear_sum;  // sum of per-tier values, independent bounds only
};

namespace bounds {

struct SiteCountBounds {
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

/// ceil(x)+ = max(ceil(x), 0) and floor(x)+ likewise.
std::int64_t ceil_plus(double x);
std::int64_t floor_plus(double x);

SiteCountBounds n_bounds(double r, double site_area);
double n_asymptotic(double r, double site_area);
SiteCountBounds n_bounds_random_user(double r, double site_area);

/// p_bar^exponent with 0^0 = 1, evaluated as exp(exponent * ln p_bar).
double void_power(double pbar, double exponent);

/// Pr(R = r_n) for the MBFC radius and its tail Pr(R >= r_n).
double mbfc_pmf(int n, double pb);
double mbfc_tail(int n, double pb);

/// Index of the last MBFC radius strictly below the range, or -1.
int last_index_below(double range, double site_area);

// Building blocks parameterized by the void probability pbar = Pr(site empty),
// so the single-tier and per-tier forms share one implementation.
double mbfc_bound(double pbar, double density, double range, double site_area, std::vector<double>* terms = nullptr);
double mbfc_semi_exact(double pbar, double density, double range, double site_area);
double mbfc_dense(double log_inv_pbar, double density, double range, double site_area);
double axis_region(double pbar, double density, double range, double site_area);
double quadrant_region(double pbar, double density, double range, double site_area);
double quadrant_dense(double log_inv_pbar, double density, double range, double site_area);

BoundResult pc_lb_mbfc(const SingleTierScenario& sc);
/// Expectation of the MBFC event with exact disk site counts; the ground truth
/// the simulated MBFC estimator converges to.
BoundResult pc_mbfc_semi_exact(const SingleTierScenario& sc);
BoundResult pc_lb_mbfc_dense(const SingleTierScenario& sc, bool small_pb_approx = false);
double region_q_axis(const SingleTierScenario& sc);
double region_q_quadrant(const SingleTierScenario& sc);
BoundResult pc_lb_multiregion(const SingleTierScenario& sc);
/// Per-quadrant dense probability; the bound is 1 - (1 - value)^4.
double multiregion_dense_quadrant(const SingleTierScenario& sc);
BoundResult pc_lb_multiregion_dense(const SingleTierScenario& sc);

/// Product of (1 - p^(l)) over l = 1..k, as used by the tier bounds.
double qk(const MultiHeightConfig& heights, int k);
/// Exact probability that a site holds no building of class 1..k.
double qk_exclusive(const MultiHeightConfig& heights, int k);

BoundResult tier_eta(const HetNetScenario& sc, int k);
BoundResult tier_eta_dense(const HetNetScenario& sc, int k);
BoundResult hetnet_lb_max(const HetNetScenario& sc, bool dense = false);

enum class RegionKind { kAxis, kQuadrant };
double hetnet_eta_region(const HetNetScenario& sc, int k, RegionKind kind);
BoundResult hetnet_lb_multiregion(const HetNetScenario& sc);
BoundResult hetnet_lb_independent(const HetNetScenario& sc, bool tightened = false);

/// The single-tier scenario seen by tier k: same lattice, pbar replaced by q_k.
SingleTierScenario tier_view(const HetNetScenario& sc, int k);

}  // namespace bounds
}  // namespace mmwave
