#pragma once

// Random-lattice building realizations and Poisson BS realizations inside a
// finite square window centered on the typical user.
//
// Site S(a,b) is the half-open square [(a-1/2)sqrt(s), (a+1/2)sqrt(s)) x
// [(b-1/2)sqrt(s), (b+1/2)sqrt(s)). Marks: 0 = empty, k >= 1 = building of
// height class k (class 1 is the tallest). The origin site is always empty.

#include <compare>
#include <cstdint>
#include <vector>

#include "mmwave/rng.hpp"

namespace mmwave {

struct LatticeConfig {
  double site_area = 0.0;  // s, m^2
  double occupancy = 0.0;  // p_b

  void validate() const;
};

struct MultiHeightConfig {
  double site_area = 0.0;
  /// p^(0) (empty) followed by p^(1..K) for heights h^(1) > ... > h^(K).
  std::vector<double> height_probs;

  int num_heights() const { return static_cast<int>(height_probs.size()) - 1; }
  void validate() const;
};

struct Window {
  double half_width = 0.0;  // m

  void validate() const;
};

struct SiteIndex {
  int a = 0;
  int b = 0;

  friend auto operator<=>(const SiteIndex&, const SiteIndex&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Largest |a| such that site a intersects [-half_width, half_width].
int site_extent(double half_width, double site_area);

/// Dense bitmap of sites with |a|, |b| <= extent. Sites outside the extent are
/// reported as absent.
class SiteSet {
public:
  SiteSet() = default;
  explicit SiteSet(int extent);
  /// Smallest extent that holds every listed site.
  static SiteSet from_sites(const std::vector<SiteIndex>& sites, int min_extent = 0);

  int extent() const { return extent_; }
  bool contains(SiteIndex idx) const {
    if (idx.a < -extent_ || idx.a > extent_ || idx.b < -extent_ || idx.b > extent_) return false;
    return bits_[offset(idx)] != 0;
  }
  void insert(SiteIndex idx);
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  /// Member sites in row-major order (b outer, a inner).
  std::vector<SiteIndex> sites() const;

  const std::vector<std::uint8_t>& raw() const { return bits_; }
  std::vector<std::uint8_t>& raw() { return bits_; }

private:
  std::size_t offset(SiteIndex idx) const {
    const auto side = static_cast<std::size_t>(2 * extent_ + 1);
    return static_cast<std::size_t>(idx.b + extent_) * side + static_cast<std::size_t>(idx.a + extent_);
  }

  int extent_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Immutable after construction; safe to share between readers.
class LatticeRealization {
public:
  LatticeRealization(double site_area, Window window, int num_heights, std::vector<std::uint8_t> marks);

  double site_area() const { return site_area_; }
  double site_side() const { return site_side_; }
  const Window& window() const { return window_; }
  int extent() const { return extent_; }
  int num_heights() const { return num_heights_; }

  /// Mark of a site inside the extent; throws WindowError otherwise.
  int mark(SiteIndex idx) const;
  const std::vector<std::uint8_t>& marks() const { return marks_; }

private:
  double site_area_;
  double site_side_;
  Window window_;
  int extent_;
  int num_heights_;
  std::vector<std::uint8_t> marks_;  // row-major, same layout as SiteSet
};

struct PointSet {
  std::vector<Point> points;
  double density = 0.0;  // 1/m^2
  Window window;
};

LatticeRealization sample_uniform_lattice(const LatticeConfig& config, Window window, Engine& eng);
LatticeRealization sample_multiheight_lattice(const MultiHeightConfig& config, Window window, Engine& eng);

/// Sites whose mark lies in {1, ..., k}: buildings tall enough to block tier k.
SiteSet blocking_sites_for_tier(const LatticeRealization& lat, int k);

PointSet sample_ppp(double density, Window window, Engine& eng);

}  // namespace mmwave
