#include "mmwave/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mmwave/errors.hpp"
#include "mmwave/geometry.hpp"

namespace mmwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClampSlack = 1e-12;

double checked_probability(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string(what) + ": non-finite value");
  if (v < 0.0) {
    if (v < -kClampSlack) throw NumericError(std::string(what) + ": value below 0: " + std::to_string(v));
    return 0.0;
  }
  if (v > 1.0) {
    if (v > 1.0 + kClampSlack) throw NumericError(std::string(what) + ": value above 1: " + std::to_string(v));
    return 1.0;
  }
  return v;
}

// 1 - exp(-x) without cancellation for small x.
double one_minus_exp(double x) { return -std::expm1(-x); }

void check_inputs(double pbar, double density, double range, double site_area) {
  if (!(pbar >= 0.0 && pbar <= 1.0)) throw ConfigError("void probability outside [0, 1]");
  if (!(std::isfinite(density) && density >= 0.0)) throw ConfigError("BS density must be non-negative");
  if (!(std::isfinite(range) && range >= 0.0)) throw ConfigError("BS range must be non-negative");
  if (!(std::isfinite(site_area) && site_area > 0.0)) throw ConfigError("site area must be positive");
}

}  // namespace

std::string to_string(BoundId id) {
  switch (id) {
    case BoundId::kMbfc: return "thm1";
    case BoundId::kMbfcSemiExact: return "thm1_semi_exact";
    case BoundId::kMbfcDense: return "thm2";
    case BoundId::kMbfcDenseSmallPb: return "thm2_small_pb";
    case BoundId::kMultiRegion: return "thm3";
    case BoundId::kMultiRegionDense: return "thm4";
    case BoundId::kTierEta: return "cor1";
    case BoundId::kTierEtaDense: return "cor2";
    case BoundId::kHetNetMax: return "thm5";
    case BoundId::kHetNetMaxDense: return "thm6";
    case BoundId::kHetNetMultiRegion: return "thm7";
    case BoundId::kHetNetIndependent: return "thm8";
    case BoundId::kHetNetIndependentTight: return "thm8_tight";
  }
  return "unknown";
}

void SingleTierScenario::validate() const {
  lattice.validate();
  if (!(std::isfinite(bs_density) && bs_density >= 0.0)) throw ConfigError("BS density must be non-negative");
  if (!(std::isfinite(range) && range >= 0.0)) throw ConfigError("BS range must be non-negative");
}

std::vector<std::string> HetNetScenario::validate() const {
  lattice.validate();
  if (tiers.empty()) throw ConfigError("HetNet scenario needs at least one tier");
  if (num_tiers() > lattice.num_heights()) {
    throw ConfigError("HetNet has " + std::to_string(num_tiers()) + " tiers but only " +
                      std::to_string(lattice.num_heights()) + " height classes");
  }
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    const Tier& t = tiers[k];
    if (!(std::isfinite(t.bs_density) && t.bs_density >= 0.0)) throw ConfigError("tier density must be non-negative");
    if (!(std::isfinite(t.range) && t.range >= 0.0)) throw ConfigError("tier range must be non-negative");
    if (k > 0 && !(tiers[k - 1].range > t.range)) {
      warnings.push_back("tier ranges are not strictly decreasing at tier " + std::to_string(k + 1));
    }
    if (k > 0 && !(tiers[k - 1].bs_density < t.bs_density)) {
      warnings.push_back("tier densities are not strictly increasing at tier " + std::to_string(k + 1));
    }
  }
  return warnings;
}

namespace bounds {

std::int64_t ceil_plus(double x) { return std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(x)), 0); }
std::int64_t floor_plus(double x) { return std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(x)), 0); }

namespace {
std::int64_t odd_square(std::int64_t half) { return (2 * half + 1) * (2 * half + 1); }
}  // namespace

SiteCountBounds n_bounds(double r, double site_area) {
  const double side = std::sqrt(site_area);
  return {odd_square(ceil_plus(r / std::sqrt(2.0 * site_area) - 0.5)), odd_square(ceil_plus(r / side - 0.5))};
}

double n_asymptotic(double r, double site_area) { return kPi * r * r / site_area; }

SiteCountBounds n_bounds_random_user(double r, double site_area) {
  const double side = std::sqrt(site_area);
  return {odd_square(ceil_plus(r / std::sqrt(2.0 * site_area) - 1.0)), odd_square(ceil_plus(r / side))};
}

double void_power(double pbar, double exponent) {
  if (exponent == 0.0) return 1.0;
  if (pbar <= 0.0) return 0.0;
  return std::exp(exponent * std::log(pbar));
}

double mbfc_tail(int n, double pb) {
  const double half = n + 0.5;
  return void_power(1.0 - pb, 4.0 * half * half - 1.0);
}

double mbfc_pmf(int n, double pb) {
  if (n < 0) throw ConfigError("MBFC index must be non-negative");
  if (!(pb >= 0.0 && pb <= 1.0)) throw ConfigError("occupancy probability outside [0, 1]");
  // pbar^a - pbar^b = pbar^a (1 - pbar^(b-a)), b - a = 8(n+1)
  const double pbar = 1.0 - pb;
  const double head = mbfc_tail(n, pb);
  if (pbar <= 0.0) return head;
  return head * one_minus_exp(-8.0 * (n + 1) * std::log(pbar));
}

int last_index_below(double range, double site_area) {
  return static_cast<int>(ceil_plus(range / std::sqrt(site_area) - 0.5)) - 1;
}

double mbfc_bound(double pbar, double density, double range, double site_area, std::vector<double>* terms) {
  check_inputs(pbar, density, range, site_area);
  const double pb = 1.0 - pbar;
  const auto n_plus = n_bounds(range, site_area).upper;
  const double first = one_minus_exp(kPi * density * range * range) * void_power(pbar, static_cast<double>(n_plus - 1));
  double value = first;
  if (terms) terms->assign(1, first);
  const int last = last_index_below(range, site_area);
  for (int n = 0; n <= last; ++n) {
    const double half = n + 0.5;
    const double term = one_minus_exp(kPi * density * site_area * half * half) * mbfc_pmf(n, pb);
    value += term;
    if (terms) terms->push_back(term);
  }
  return value;
}

double mbfc_semi_exact(double pbar, double density, double range, double site_area) {
  check_inputs(pbar, density, range, site_area);
  // Pr(R >= r_n) = pbar^(N(r_n) - 1) with the exact disk count N.
  auto tail = [&](int n) {
    const auto count = mbfc_disk_site_count(n);
    return void_power(pbar, static_cast<double>(count - 1));
  };
  const int last = last_index_below(range, site_area);
  double value = 0.0;
  double upper = tail(0);
  for (int n = 0; n <= last; ++n) {
    const double lower = tail(n + 1);
    const double radius = mbfc_radius(n, site_area);
    value += one_minus_exp(kPi * density * radius * radius) * (upper - lower);
    upper = lower;
    if (upper == 0.0) break;
  }
  value += one_minus_exp(kPi * density * range * range) * upper;
  return value;
}

double mbfc_dense(double log_inv_pbar, double density, double range, double site_area) {
  const double site_density = 1.0 / site_area;
  const double blockage = site_density * log_inv_pbar;  // lambda_s ln(1/pbar)
  const double total = density + blockage;
  if (total == 0.0) return 0.0;
  const double first = density / total * one_minus_exp(kPi * range * range * total);
  const double second = blockage / total * one_minus_exp(kPi * density / site_density);
  return first + second;
}

double axis_region(double pbar, double density, double range, double site_area) {
  check_inputs(pbar, density, range, site_area);
  const double rho = range / std::sqrt(site_area);
  const double inside = static_cast<double>(floor_plus(rho - 0.5));
  const double first = one_minus_exp(site_area * density * inside) * void_power(pbar, static_cast<double>(ceil_plus(rho - 0.5)));
  double value = first;
  const double pb = 1.0 - pbar;
  const int last = last_index_below(range, site_area);
  for (int l = 0; l <= last; ++l) {
    value += pb * one_minus_exp(site_area * density * l) * void_power(pbar, l);
  }
  return value;
}

double quadrant_region(double pbar, double density, double range, double site_area) {
  check_inputs(pbar, density, range, site_area);
  const double rho = range / std::sqrt(site_area);
  const double inside = static_cast<double>(floor_plus(rho - 0.5));
  const double outer = static_cast<double>(ceil_plus(rho - 0.5));
  const double first = one_minus_exp(0.25 * kPi * site_area * density * inside * inside) * void_power(pbar, outer * outer);
  double value = first;
  const int last = last_index_below(range, site_area);
  for (int l = 0; l <= last; ++l) {
    const double l2 = static_cast<double>(l) * l;
    // pbar^(l^2) (1 - pbar^(2l+1)) = pbar^(l^2) - pbar^((l+1)^2)
    const double layer = void_power(pbar, l2) - void_power(pbar, (l + 1.0) * (l + 1.0));
    value += one_minus_exp(0.25 * kPi * site_area * density * l2) * layer;
  }
  return value;
}

double quadrant_dense(double log_inv_pbar, double density, double range, double site_area) {
  const double site_density = 1.0 / site_area;
  const double blockage = site_density * log_inv_pbar;
  const double total = 4.0 * density + blockage;
  if (total == 0.0) return 0.0;
  const double first = 4.0 * density / total * one_minus_exp(0.25 * kPi * range * range * (density + blockage));
  const double second = blockage / total * one_minus_exp(0.25 * kPi * density / site_density);
  return first + second;
}

namespace {

double dense_log_inv(double pb, bool small_pb_approx) {
  if (small_pb_approx) return pb;
  if (pb >= 1.0) throw DomainError("dense-site bound needs p_b < 1 (ln(1/(1-p_b)) diverges)");
  return -std::log1p(-pb);
}

double eight_region(double q_axis, double q_quadrant) {
  return 1.0 - std::pow(1.0 - q_axis, 4) * std::pow(1.0 - q_quadrant, 4);
}

}  // namespace

BoundResult pc_lb_mbfc(const SingleTierScenario& sc) {
  sc.validate();
  BoundResult out;
  out.id = BoundId::kMbfc;
  const double v = mbfc_bound(1.0 - sc.lattice.occupancy, sc.bs_density, sc.range, sc.lattice.site_area, &out.terms);
  out.value = checked_probability(v, "pc_lb_mbfc");
  return out;
}

BoundResult pc_mbfc_semi_exact(const SingleTierScenario& sc) {
  sc.validate();
  const double v = mbfc_semi_exact(1.0 - sc.lattice.occupancy, sc.bs_density, sc.range, sc.lattice.site_area);
  return {checked_probability(v, "pc_mbfc_semi_exact"), BoundId::kMbfcSemiExact, {}, {}, {}};
}

BoundResult pc_lb_mbfc_dense(const SingleTierScenario& sc, bool small_pb_approx) {
  sc.validate();
  const double l = dense_log_inv(sc.lattice.occupancy, small_pb_approx);
  const double v = mbfc_dense(l, sc.bs_density, sc.range, sc.lattice.site_area);
  return {checked_probability(v, "pc_lb_mbfc_dense"),
          small_pb_approx ? BoundId::kMbfcDenseSmallPb : BoundId::kMbfcDense, {}, {}, {}};
}

double region_q_axis(const SingleTierScenario& sc) {
  sc.validate();
  return checked_probability(axis_region(1.0 - sc.lattice.occupancy, sc.bs_density, sc.range, sc.lattice.site_area),
                             "region_q_axis");
}

double region_q_quadrant(const SingleTierScenario& sc) {
  sc.validate();
  return checked_probability(
      quadrant_region(1.0 - sc.lattice.occupancy, sc.bs_density, sc.range, sc.lattice.site_area),
      "region_q_quadrant");
}

BoundResult pc_lb_multiregion(const SingleTierScenario& sc) {
  const double qa = region_q_axis(sc);
  const double qq = region_q_quadrant(sc);
  return {checked_probability(eight_region(qa, qq), "pc_lb_multiregion"), BoundId::kMultiRegion, {qa, qq}, {}, {}};
}

double multiregion_dense_quadrant(const SingleTierScenario& sc) {
  sc.validate();
  const double l = dense_log_inv(sc.lattice.occupancy, false);
  return checked_probability(quadrant_dense(l, sc.bs_density, sc.range, sc.lattice.site_area),
                             "multiregion_dense_quadrant");
}

BoundResult pc_lb_multiregion_dense(const SingleTierScenario& sc) {
  const double p = multiregion_dense_quadrant(sc);
  return {checked_probability(1.0 - std::pow(1.0 - p, 4), "pc_lb_multiregion_dense"), BoundId::kMultiRegionDense,
          {p}, {}, {}};
}

double qk(const MultiHeightConfig& heights, int k) {
  if (k < 1 || k > heights.num_heights()) throw ConfigError("tier index out of range");
  double q = 1.0;
  for (int l = 1; l <= k; ++l) q *= 1.0 - heights.height_probs[static_cast<std::size_t>(l)];
  return q;
}

double qk_exclusive(const MultiHeightConfig& heights, int k) {
  if (k < 1 || k > heights.num_heights()) throw ConfigError("tier index out of range");
  double mass = 0.0;
  for (int l = 1; l <= k; ++l) mass += heights.height_probs[static_cast<std::size_t>(l)];
  return std::clamp(1.0 - mass, 0.0, 1.0);
}

SingleTierScenario tier_view(const HetNetScenario& sc, int k) {
  if (k < 1 || k > sc.num_tiers()) throw ConfigError("tier index " + std::to_string(k) + " out of range");
  const Tier& t = sc.tiers[static_cast<std::size_t>(k - 1)];
  return {{sc.lattice.site_area, 1.0 - qk(sc.lattice, k)}, t.bs_density, t.range};
}

BoundResult tier_eta(const HetNetScenario& sc, int k) {
  sc.validate();
  const SingleTierScenario view = tier_view(sc, k);
  BoundResult out;
  out.id = BoundId::kTierEta;
  out.value = checked_probability(
      mbfc_bound(qk(sc.lattice, k), view.bs_density, view.range, view.lattice.site_area, &out.terms), "tier_eta");
  return out;
}

BoundResult tier_eta_dense(const HetNetScenario& sc, int k) {
  sc.validate();
  const SingleTierScenario view = tier_view(sc, k);
  const double q = qk(sc.lattice, k);
  if (q <= 0.0) throw DomainError("dense tier bound needs q_k > 0 (ln(1/q_k) diverges)");
  const double v = mbfc_dense(-std::log(q), view.bs_density, view.range, view.lattice.site_area);
  return {checked_probability(v, "tier_eta_dense"), BoundId::kTierEtaDense, {}, {}, {}};
}

BoundResult hetnet_lb_max(const HetNetScenario& sc, bool dense) {
  sc.validate();
  BoundResult out;
  out.id = dense ? BoundId::kHetNetMaxDense : BoundId::kHetNetMax;
  for (int k = 1; k <= sc.num_tiers(); ++k) {
    const double eta = dense ? tier_eta_dense(sc, k).value : tier_eta(sc, k).value;
    out.terms.push_back(eta);
    if (!out.argmax_tier || eta > out.value) {
      out.value = eta;
      out.argmax_tier = k;
    }
  }
  return out;
}

double hetnet_eta_region(const HetNetScenario& sc, int k, RegionKind kind) {
  sc.validate();
  const SingleTierScenario view = tier_view(sc, k);
  const double q = qk(sc.lattice, k);
  const double v = kind == RegionKind::kAxis
                       ? axis_region(q, view.bs_density, view.range, view.lattice.site_area)
                       : quadrant_region(q, view.bs_density, view.range, view.lattice.site_area);
  return checked_probability(v, "hetnet_eta_region");
}

namespace {
double tier_eight_region(const HetNetScenario& sc, int k) {
  return eight_region(hetnet_eta_region(sc, k, RegionKind::kAxis), hetnet_eta_region(sc, k, RegionKind::kQuadrant));
}
}  // namespace

BoundResult hetnet_lb_multiregion(const HetNetScenario& sc) {
  sc.validate();
  BoundResult out;
  out.id = BoundId::kHetNetMultiRegion;
  for (int k = 1; k <= sc.num_tiers(); ++k) {
    const double v = tier_eight_region(sc, k);
    out.terms.push_back(v);
    if (!out.argmax_tier || v > out.value) {
      out.value = v;
      out.argmax_tier = k;
    }
  }
  out.value = checked_probability(out.value, "hetnet_lb_multiregion");
  return out;
}

BoundResult hetnet_lb_independent(const HetNetScenario& sc, bool tightened) {
  sc.validate();
  BoundResult out;
  out.id = tightened ? BoundId::kHetNetIndependentTight : BoundId::kHetNetIndependent;
  double miss = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= sc.num_tiers(); ++k) {
    const double v = tightened ? tier_eight_region(sc, k) : tier_eta(sc, k).value;
    out.terms.push_back(v);
    miss *= 1.0 - v;
    sum += v;
  }
  out.value = checked_probability(1.0 - miss, "hetnet_lb_independent");
  out.linear_sum = sum;
  return out;
}

}  // namespace bounds
}  // namespace mmwave
