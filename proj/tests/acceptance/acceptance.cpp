// Acceptance suite: one check per primary criterion, one PASS/FAIL line each.
//
//   acceptance               run every criterion
//   acceptance --criterion N run criterion N only

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "mmwave/experiment.hpp"

using namespace mmwave;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "VIOLATED ") + what;
  }
};

SingleTierScenario paper_single() { return default_single_tier(); }

// Brute-force N(r): sites whose square meets the open disk, by nearest-point distance.
std::int64_t enumerate_sites(double rho) {
  const int reach = static_cast<int>(rho) + 2;
  std::int64_t n = 0;
  for (int a = -reach; a <= reach; ++a) {
    for (int b = -reach; b <= reach; ++b) {
      const double dx = std::max(std::abs(a) - 0.5, 0.0), dy = std::max(std::abs(b) - 0.5, 0.0);
      n += dx * dx + dy * dy < rho * rho;
    }
  }
  return n;
}

Verdict criterion1() {
  Verdict v;
  const double s = 30.0, side = std::sqrt(s);
  int violations = 0, oracle_mismatch = 0;
  for (int i = 1; i <= 50; ++i) {
    const double rho = i / 10.0;
    const auto nb = bounds::n_bounds(rho * side, s);
    const auto exact = exact_covered_site_count(rho * side, s);
    oracle_mismatch += exact != enumerate_sites(rho);
    violations += !(nb.lower <= exact && exact <= nb.upper);
  }
  v.require(violations == 0, fmt::format("{} sandwich violations on r/sqrt(s) = 0.1..5.0", violations));
  v.require(oracle_mismatch == 0, fmt::format("{} mismatches against enumeration", oracle_mismatch));
  const auto nb = bounds::n_bounds(1.5 * side, s);
  const auto exact = exact_covered_site_count(1.5 * side, s);
  v.require(nb.lower == 9 && exact == 9 && nb.upper == 9,
            fmt::format("at 1.5: N- = {}, N = {}, N+ = {}", nb.lower, exact, nb.upper));
  return v;
}

Verdict criterion2() {
  Verdict v;
  const double s = 30.0;
  for (auto [rho, tol] : {std::pair{30.0, 0.10}, std::pair{100.0, 0.03}}) {
    const double r = rho * std::sqrt(s);
    const double asym = bounds::n_asymptotic(r, s);
    const double rel = std::abs(static_cast<double>(exact_covered_site_count(r, s)) - asym) / asym;
    v.require(rel < tol, fmt::format("r/sqrt(s) = {}: rel err {:.4f} < {}", rho, rel, tol));
  }
  return v;
}

Verdict criterion3() {
  Verdict v;
  const std::int64_t n = 100000;
  const auto pmf = estimate_pmf(paper_single(), 2, n, 3);
  const double ref0 = 1 - std::pow(0.7, 8);
  const double ref1 = std::pow(0.7, 8) - std::pow(0.7, 24);
  for (auto [k, ref] : {std::pair{0, ref0}, std::pair{1, ref1}}) {
    const double sigma = std::sqrt(ref * (1 - ref) / static_cast<double>(n));
    const double got = pmf[static_cast<std::size_t>(k)].p_hat;
    v.require(std::abs(got - ref) <= 3 * sigma,
              fmt::format("Pr(R = r_{}) = {:.5f} vs {:.5f} (3 sigma = {:.5f})", k, got, ref, 3 * sigma));
  }
  std::int64_t total = 0;
  for (const auto& e : pmf) total += e.successes;
  v.require(total == n, fmt::format("buckets sum to {} of {}", total, n));
  return v;
}

Verdict criterion4() {
  Verdict v;
  auto sc = paper_single();
  sc.lattice.occupancy = 0.0;
  const double truth = 1 - std::exp(-pi * 6e-5 * 150.0 * 150.0);
  const auto e = estimate({EstimatorKind::kExactSingle}, sc, 100000, 4);
  v.require(e.ci_low <= truth && truth <= e.ci_high,
            fmt::format("{:.5f} in [{:.5f}, {:.5f}]", truth, e.ci_low, e.ci_high));
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto sc = paper_single();
  const auto e = estimate({EstimatorKind::kMbfcSingle}, sc, 1000000, 5);
  const auto [lo, hi] = wilson_ci(e.successes, e.trials, 0.99);
  const double oracle = bounds::pc_mbfc_semi_exact(sc).value;
  v.require(lo <= oracle && oracle <= hi,
            fmt::format("semi-analytic {:.6f} in 99% CI [{:.6f}, {:.6f}] (p_hat {:.6f})", oracle, lo, hi, e.p_hat));
  return v;
}

struct PairedCounts {
  std::int64_t exact = 0, mbfc = 0, multi = 0;
  std::int64_t mbfc_not_multi = 0, multi_not_exact = 0, mbfc_not_exact = 0;
};

PairedCounts paired_run(const SingleTierScenario& sc, std::int64_t trials, std::uint64_t seed) {
  const RngStream stream(seed);
  const unsigned workers = resolve_workers(0);
  std::vector<PairedCounts> partial(workers);
  std::atomic<std::int64_t> next{0};
  auto work = [&](unsigned w) {
    PairedCounts& c = partial[w];
    for (std::int64_t t = next++; t < trials; t = next++) {
      Engine eng = stream.substream(static_cast<std::uint64_t>(t));
      const auto o = simulate_trial(sc, {}, eng).tiers[0];
      c.exact += o.exact;
      c.mbfc += o.mbfc;
      c.multi += o.multiregion;
      c.mbfc_not_multi += o.mbfc && !o.multiregion;
      c.multi_not_exact += o.multiregion && !o.exact;
      c.mbfc_not_exact += o.mbfc && !o.exact;
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  PairedCounts sum;
  for (const auto& c : partial) {
    sum.exact += c.exact;
    sum.mbfc += c.mbfc;
    sum.multi += c.multi;
    sum.mbfc_not_multi += c.mbfc_not_multi;
    sum.multi_not_exact += c.multi_not_exact;
    sum.mbfc_not_exact += c.mbfc_not_exact;
  }
  return sum;
}

Verdict criterion6() {
  Verdict v;
  const auto cfg = preset("fig5");
  const auto points = cfg.sweep->values();
  const std::int64_t trials = 100000;
  int thm_order = 0, mbfc_ci = 0, multi_ci = 0;
  PairedCounts total;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto sc = std::get<SingleTierScenario>(apply_sweep(cfg.scenario, "lambda_c", points[i]));
    const double thm1 = bounds::pc_lb_mbfc(sc).value;
    const double thm3 = bounds::pc_lb_multiregion(sc).value;
    const auto c = paired_run(sc, trials, point_seed(cfg.seed, i));
    const double mbfc_hi = wilson_ci(c.mbfc, trials).second;
    const double multi_hi = wilson_ci(c.multi, trials).second;
    thm_order += !(thm1 <= thm3);
    mbfc_ci += !(thm1 <= mbfc_hi);
    multi_ci += !(thm3 <= multi_hi);
    total.mbfc_not_multi += c.mbfc_not_multi;
    total.multi_not_exact += c.multi_not_exact;
    total.mbfc_not_exact += c.mbfc_not_exact;
    std::printf("    lambda_c=%.3g thm1=%.5f thm3=%.5f sim_mbfc=%.5f sim_multi=%.5f sim_exact=%.5f\n", points[i], thm1,
                thm3, c.mbfc / 1e5, c.multi / 1e5, c.exact / 1e5);
  }
  v.require(thm_order == 0, fmt::format("thm1 <= thm3 failed at {} points", thm_order));
  v.require(mbfc_ci == 0, fmt::format("thm1 <= sim_mbfc CI-high failed at {} points", mbfc_ci));
  v.require(multi_ci == 0, fmt::format("thm3 <= sim_multiregion CI-high failed at {} points", multi_ci));
  v.require(total.mbfc_not_multi == 0, fmt::format("{} paired draws with mbfc but not multiregion", total.mbfc_not_multi));
  v.require(total.multi_not_exact == 0,
            fmt::format("{} paired draws with multiregion but not exact", total.multi_not_exact));
  v.require(total.mbfc_not_exact == 0, fmt::format("{} paired draws with mbfc but not exact", total.mbfc_not_exact));
  return v;
}

Verdict criterion7() {
  Verdict v;
  auto sc = paper_single();
  sc.lattice.site_area = 0.1;
  const double semi = bounds::pc_mbfc_semi_exact(sc).value;
  const double thm2 = bounds::pc_lb_mbfc_dense(sc).value;
  const double gap = std::abs(semi - thm2) / thm2;
  v.require(gap < 0.01, fmt::format("s = 0.1: semi-exact {:.6g} vs thm2 {:.6g}, rel gap {:.4f} < 0.01", semi, thm2, gap));
  sc.lattice.site_area = 1e-4;
  const double tiny = bounds::pc_lb_mbfc_dense(sc).value;
  v.require(tiny < 1e-3, fmt::format("s = 1e-4: thm2 = {:.3g} < 1e-3", tiny));
  return v;
}

Verdict criterion8() {
  Verdict v;
  auto sc = paper_single();
  sc.bs_density = 1e-7;
  const double qa = bounds::region_q_axis(sc), qq = bounds::region_q_quadrant(sc);
  const double thm3 = bounds::pc_lb_multiregion(sc).value;
  const double sum = 4 * qa + 4 * qq;
  const double r1 = std::abs(thm3 - sum) / sum;
  v.require(r1 < 0.05, fmt::format("thm3 {:.6g} vs sum of q {:.6g}, rel {:.2e}", thm3, sum, r1));
  const double p = bounds::multiregion_dense_quadrant(sc);
  const double thm4 = bounds::pc_lb_multiregion_dense(sc).value;
  const double r2 = std::abs(thm4 - 4 * p) / (4 * p);
  v.require(r2 < 0.05, fmt::format("1-(1-p)^4 {:.6g} vs 4p {:.6g}, rel {:.2e}", thm4, 4 * p, r2));
  return v;
}

Verdict criterion9() {
  Verdict v;
  const auto single = paper_single();
  HetNetScenario k1;
  k1.lattice = {single.lattice.site_area, {1 - single.lattice.occupancy, single.lattice.occupancy}};
  k1.tiers = {{single.bs_density, single.range}};
  const auto es = estimate_all(
      {{EstimatorKind::kExactSingle}, {EstimatorKind::kMbfcSingle}, {EstimatorKind::kMultiRegionSingle}}, single,
      20000, 9);
  const auto eh = estimate_all(
      {{EstimatorKind::kExactHetNet}, {EstimatorKind::kMbfcHetNet}, {EstimatorKind::kMultiRegionHetNet}}, k1, 20000,
      9);
  bool same = true;
  for (std::size_t i = 0; i < 3; ++i) same = same && es[i].successes == eh[i].successes;
  v.require(same, fmt::format("K = 1 successes {}/{}/{} vs {}/{}/{}", es[0].successes, es[1].successes,
                              es[2].successes, eh[0].successes, eh[1].successes, eh[2].successes));
  v.require(bounds::hetnet_lb_max(k1).value == bounds::pc_lb_mbfc(single).value &&
                bounds::hetnet_lb_multiregion(k1).value == bounds::pc_lb_multiregion(single).value,
            "K = 1 bounds equal single-tier bounds");

  auto small = default_hetnet();
  for (auto& t : small.tiers) t.bs_density *= 0.01;
  const auto ind = bounds::hetnet_lb_independent(small);
  const double rel = std::abs(ind.value - *ind.linear_sum) / *ind.linear_sum;
  v.require(rel < 0.05, fmt::format("lambda x0.01: thm8 {:.6g} vs sum of eta {:.6g}, rel {:.2e}", ind.value,
                                    *ind.linear_sum, rel));

  auto cfg = preset("tiers");
  cfg.quantities = {"sim_exact_hetnet", "sim_per_tier"};
  const auto rows = run_experiment(cfg);
  std::map<double, std::pair<double, double>> exact;  // K -> (p_hat, ci_high)
  std::map<double, double> best;
  for (const auto& r : rows) {
    if (r.quantity == "sim_exact_hetnet") exact[*r.sweep_value] = {r.value, *r.ci_high};
    if (r.quantity.rfind("sim_per_tier_", 0) == 0) best[*r.sweep_value] = std::max(best[*r.sweep_value], r.value);
  }
  int bad = 0;
  for (const auto& [k, e] : exact) {
    bad += !(e.second >= best[k]);
    std::printf("    K=%g sim_exact_hetnet=%.5f max per-tier=%.5f\n", k, e.first, best[k]);
  }
  v.require(bad == 0 && exact.size() == 3, fmt::format("sim_exact_hetnet CI-high >= max per-tier estimate at {} of {} K values",
                                                   exact.size() - static_cast<std::size_t>(bad), exact.size()));
  return v;
}

Verdict criterion10() {
  Verdict v;
  const auto sc = default_hetnet();
  const auto est = estimate_all({{EstimatorKind::kPerTier, 2}, {EstimatorKind::kPerTier, 3}}, sc, 100000, 10);
  for (int k = 2; k <= 3; ++k) {
    const auto& e = est[static_cast<std::size_t>(k - 2)];
    const double eta = bounds::tier_eta(sc, k).value;
    const double diff = eta - e.p_hat;
    v.detail += fmt::format("{}k={}: q_k product={:.4f} one-minus-sum={:.4f} eta={:.5f} sim={:.5f} [{:.5f}, {:.5f}] diff={:+.5f} ({})",
                            k == 2 ? "" : "; ", k, bounds::qk(sc.lattice, k), bounds::qk_exclusive(sc.lattice, k),
                            eta, e.p_hat, e.ci_low, e.ci_high, diff, diff <= 0 ? "bound holds" : "bound exceeds sim");
  }
  v.detail += "; reported only";
  return v;
}

Verdict criterion11() {
  Verdict v;
  const auto cfg = preset("fig5");
  std::ostringstream one, eight;
  write_csv(one, run_experiment(cfg, 1));
  write_csv(eight, run_experiment(cfg, 8));
  v.require(one.str() == eight.str(),
            fmt::format("fig5 CSVs with seed {} under 1 and 8 workers identical ({} bytes)", cfg.seed, one.str().size()));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"site-count sandwich", criterion1},      {"site-count asymptotic", criterion2},
      {"MBFC radius PMF", criterion3},          {"no-blockage closed form", criterion4},
      {"MBFC exactness", criterion5},           {"bound ordering on the fig5 sweep", criterion6},
      {"dense-site convergence", criterion7},   {"multi-region factor", criterion8},
      {"HetNet reduction and gain", criterion9}, {"q_k diagnostic", criterion10},
      {"determinism", criterion11},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu (%s): %s [%.1fs] %s\n", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL", secs,
                v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
