#include "mmwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmwave/errors.hpp"

namespace mmwave {

namespace {

// Segment in cell coordinates, where site (i,j) is the unit square [i,i+1) x [j,j+1).
struct CellSegment {
  double u0, v0, u1, v1;
};

CellSegment to_cells(const Segment& seg, double side) {
  return {seg.a.x / side + 0.5, seg.a.y / side + 0.5, seg.b.x / side + 0.5, seg.b.y / side + 0.5};
}

// Clips the open slab lo < p0 + t d < hi against [t_lo, t_hi].
bool clip_open_slab(double p0, double d, double lo, double hi, double& t_lo, double& t_hi) {
  if (d == 0.0) return lo < p0 && p0 < hi;
  double ta = (lo - p0) / d;
  double tb = (hi - p0) / d;
  if (ta > tb) std::swap(ta, tb);
  t_lo = std::max(t_lo, ta);
  t_hi = std::min(t_hi, tb);
  return true;
}

// Positive-length overlap of the closed segment with the open unit cell (i,j).
bool hits_open_cell(const CellSegment& s, int i, int j) {
  const double du = s.u1 - s.u0;
  const double dv = s.v1 - s.v0;
  double t_lo = 0.0;
  double t_hi = 1.0;
  if (!clip_open_slab(s.u0, du, i, i + 1.0, t_lo, t_hi)) return false;
  if (!clip_open_slab(s.v0, dv, j, j + 1.0, t_lo, t_hi)) return false;
  if (du == 0.0 && dv == 0.0) return true;  // point strictly inside
  return t_lo < t_hi;
}

int floor_int(double x) { return static_cast<int>(std::floor(x)); }

constexpr double kCellSlack = 1e-9;

}  // namespace

double MbfcIndex::radius(double site_area) const { return std::sqrt(site_area) * (n + 0.5); }

SiteIndex site_of_point(Point p, double site_area) {
  const double side = std::sqrt(site_area);
  return {floor_int(p.x / side + 0.5), floor_int(p.y / side + 0.5)};
}

bool segment_blocked(const Segment& seg, const SiteSet& blocking, double site_area) {
  const CellSegment s = to_cells(seg, std::sqrt(site_area));
  const double du = s.u1 - s.u0;
  const double dv = s.v1 - s.v0;

  auto test = [&](int i, int j) { return blocking.contains({i, j}) && hits_open_cell(s, i, j); };

  if (du == 0.0 && dv == 0.0) return test(floor_int(s.u0), floor_int(s.v0));

  // March along the major axis; each unit step spans at most two minor cells,
  // and candidates are confirmed by the exact open-cell test.
  const bool u_major = std::abs(du) >= std::abs(dv);
  const double p0 = u_major ? s.u0 : s.v0;
  const double p1 = u_major ? s.u1 : s.v1;
  const double q0 = u_major ? s.v0 : s.u0;
  const double slope = u_major ? dv / du : du / dv;
  const double p_min = std::min(p0, p1);
  const double p_max = std::max(p0, p1);

  for (int c = floor_int(p_min); c <= floor_int(p_max); ++c) {
    const double lo = std::max<double>(c, p_min);
    const double hi = std::min<double>(c + 1.0, p_max);
    const double qa = q0 + (lo - p0) * slope;
    const double qb = q0 + (hi - p0) * slope;
    const int r_first = floor_int(std::min(qa, qb) - kCellSlack);
    const int r_last = floor_int(std::max(qa, qb) + kCellSlack);
    for (int r = r_first; r <= r_last; ++r) {
      if (u_major ? test(c, r) : test(r, c)) return true;
    }
  }
  return false;
}

namespace {

// Sites with nearest_distance_key below `limit` (= 4 rho^2).
template <typename Below>
std::int64_t count_sites_below(double rho, Below below) {
  const int reach = static_cast<int>(std::ceil(rho)) + 1;
  std::int64_t count = 0;
  for (int a = 0; a <= reach; ++a) {
    if (!below(nearest_distance_key({a, 0}))) break;
    // largest m >= 0 with key(a, m) < limit
    const double da = a == 0 ? 0.0 : a - 0.5;
    int m = static_cast<int>(std::ceil(std::sqrt(std::max(rho * rho - da * da, 0.0)) + 0.5)) - 1;
    m = std::max(m, 0);
    while (below(nearest_distance_key({a, m + 1}))) ++m;
    while (m > 0 && !below(nearest_distance_key({a, m}))) --m;
    const std::int64_t column = 2 * static_cast<std::int64_t>(m) + 1;
    count += a == 0 ? column : 2 * column;
  }
  return count;
}

}  // namespace

std::int64_t covered_site_count_for_ratio(double rho) {
  if (!(rho >= 0.0)) throw ConfigError("site count needs a non-negative radius");
  const double limit = 4.0 * rho * rho;
  return count_sites_below(rho, [limit](std::int64_t key) { return static_cast<double>(key) < limit; });
}

std::int64_t exact_covered_site_count(double r, double site_area) {
  if (!(r >= 0.0) || !(site_area > 0.0)) throw ConfigError("exact_covered_site_count needs r >= 0 and s > 0");
  return covered_site_count_for_ratio(r / std::sqrt(site_area));
}

std::int64_t mbfc_disk_site_count(int n) {
  if (n < 0) throw ConfigError("MBFC index must be non-negative");
  const std::int64_t limit = (2 * static_cast<std::int64_t>(n) + 1) * (2 * static_cast<std::int64_t>(n) + 1);
  return count_sites_below(n + 0.5, [limit](std::int64_t key) { return key < limit; });
}

int largest_clear_index(std::int64_t key) {
  if (key <= 0) return -1;
  auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(key)));
  while (root * root > key) --root;
  while ((root + 1) * (root + 1) <= key) ++root;
  return static_cast<int>((root - 1) / 2);
}

int mbfc_cap_for_range(double range, double site_area) {
  const double n = std::ceil(range / std::sqrt(site_area) - 0.5);
  return n > 0.0 ? static_cast<int>(n) : 0;
}

namespace {

void check_cap(const LatticeRealization& lat, int cap_n) {
  if (cap_n < 0) throw ConfigError("MBFC cap must be non-negative");
  if (cap_n > lat.extent()) {
    throw WindowError("window extent " + std::to_string(lat.extent()) + " sites is too small for MBFC cap " +
                      std::to_string(cap_n));
  }
}

}  // namespace

std::array<int, kNumRegions + 1> region_mbfc_indices(const LatticeRealization& lat, const SiteSet& blocking,
                                                     int cap_n) {
  check_cap(lat, cap_n);
  if (blocking.contains({0, 0})) throw ConfigError("the user's own site cannot be blocked");
  constexpr auto kNone = std::numeric_limits<std::int64_t>::max();
  std::array<std::int64_t, kNumRegions + 1> min_key;
  min_key.fill(kNone);
  // Only sites with |a|, |b| <= cap can reach inside B(r_cap).
  for (int b = -cap_n; b <= cap_n; ++b) {
    for (int a = -cap_n; a <= cap_n; ++a) {
      if (!blocking.contains({a, b})) continue;
      const RegionId region = region_of_site({a, b});
      min_key[static_cast<std::size_t>(region)] =
          std::min(min_key[static_cast<std::size_t>(region)], nearest_distance_key({a, b}));
    }
  }
  std::array<int, kNumRegions + 1> out;
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = min_key[r] == kNone ? cap_n : std::min(cap_n, largest_clear_index(min_key[r]));
  }
  return out;
}

MbfcIndex mbfc_radius_index(const LatticeRealization& lat, const SiteSet& blocking, int cap_n) {
  const auto per_region = region_mbfc_indices(lat, blocking, cap_n);
  return {*std::min_element(per_region.begin() + 1, per_region.end())};
}

RegionId region_of_site(SiteIndex idx) {
  const int a = idx.a;
  const int b = idx.b;
  if (a == 0 && b == 0) return 0;
  if (b == 0) return a > 0 ? 1 : 5;
  if (a == 0) return b > 0 ? 3 : 7;
  if (a > 0) return b > 0 ? 2 : 8;
  return b > 0 ? 4 : 6;
}

MbfcIndex region_mbfc_radius_index(const LatticeRealization& lat, const SiteSet& blocking, RegionId region,
                                   int cap_n) {
  if (region < 1 || region > kNumRegions) {
    throw ConfigError("region id must be in 1..8, got " + std::to_string(region));
  }
  return {region_mbfc_indices(lat, blocking, cap_n)[static_cast<std::size_t>(region)]};
}

bool has_los_bs(const LatticeRealization& lat, const SiteSet& blocking, const PointSet& bss, double r) {
  if (r + lat.site_side() > lat.window().half_width * (1.0 + 1e-12)) {
    throw WindowError("window half width must be at least r + sqrt(s)");
  }
  const double r2 = r * r;
  for (const Point& p : bss.points) {
    if (p.x * p.x + p.y * p.y > r2) continue;
    if (!segment_blocked({{0.0, 0.0}, p}, blocking, lat.site_area())) return true;
  }
  return false;
}

}  // namespace mmwave
