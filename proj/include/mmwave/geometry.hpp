#pragma once

// Exact lattice geometry around the typical user at the origin.
//
// Blockage uses the open-interior convention: a segment or disk is blocked by a
// building only if it overlaps the open square. Grazing an edge or a corner
// never blocks.

#include <array>
#include <cstdint>

#include "mmwave/lattice.hpp"

namespace mmwave {

struct Segment {
  Point a;
  Point b;
};

/// n encodes the radius r_n = sqrt(s) (n + 1/2).
struct MbfcIndex {
  int n = 0;

  double radius(double site_area) const;
  friend auto operator<=>(const MbfcIndex&, const MbfcIndex&) = default;
};

inline double mbfc_radius(int n, double site_area) { return MbfcIndex{n}.radius(site_area); }

/// 0: the user's site. 1,3,5,7: axis strips east, north, west, south.
/// 2,4,6,8: quadrants (+,+), (-,+), (-,-), (+,-).
using RegionId = int;
inline constexpr int kNumRegions = 8;

inline constexpr bool is_axis_region(RegionId r) { return r % 2 == 1; }

SiteIndex site_of_point(Point p, double site_area);

/// True iff the segment meets the open interior of a blocking site. Walks only
/// the cells the segment crosses.
bool segment_blocked(const Segment& seg, const SiteSet& blocking, double site_area);

/// Sites whose square overlaps the disk B(r) in positive area.
std::int64_t exact_covered_site_count(double r, double site_area);
/// Same count for the radius ratio r / sqrt(s).
std::int64_t covered_site_count_for_ratio(double rho);
/// Exact count for the MBFC radius r_n, in integer arithmetic.
std::int64_t mbfc_disk_site_count(int n);

/// 4 x squared distance, in site units, from the origin to the nearest point of
/// site (a,b): (2|a|-1)+^2 + (2|b|-1)+^2. B(r_n) touches the open site iff this
/// is below (2n+1)^2.
inline std::int64_t nearest_distance_key(SiteIndex idx) {
  const std::int64_t da = idx.a == 0 ? 0 : 2 * static_cast<std::int64_t>(idx.a < 0 ? -idx.a : idx.a) - 1;
  const std::int64_t db = idx.b == 0 ? 0 : 2 * static_cast<std::int64_t>(idx.b < 0 ? -idx.b : idx.b) - 1;
  return da * da + db * db;
}

/// Largest n with (2n+1)^2 <= key, i.e. the largest MBFC index whose disk stays
/// clear of a site at that distance key.
int largest_clear_index(std::int64_t key);

/// Smallest n with r_n >= r: the cap under which min(R, r) is unaffected.
int mbfc_cap_for_range(double range, double site_area);

MbfcIndex mbfc_radius_index(const LatticeRealization& lat, const SiteSet& blocking, int cap_n);

RegionId region_of_site(SiteIndex idx);

MbfcIndex region_mbfc_radius_index(const LatticeRealization& lat, const SiteSet& blocking, RegionId region,
                                   int cap_n);

/// Per-region capped indices in one pass over the lattice; entry 0 is unused
/// (the user's site is never blocked) and set to cap_n.
std::array<int, kNumRegions + 1> region_mbfc_indices(const LatticeRealization& lat, const SiteSet& blocking,
                                                     int cap_n);

/// Some BS within distance r of the origin has an unblocked segment to it.
bool has_los_bs(const LatticeRealization& lat, const SiteSet& blocking, const PointSet& bss, double r);

}  // namespace mmwave
