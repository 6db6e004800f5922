#include "mmwave/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmwave/errors.hpp"

namespace mmwave {

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void check_site_area(double s) {
  if (!(std::isfinite(s) && s > 0.0)) {
    throw ConfigError("site area must be positive and finite, got " + std::to_string(s));
  }
}

// Fills `marks` site by site in row-major order. Each 64-bit draw supplies two
// 32-bit uniforms; `classify` maps one uniform to a mark.
template <typename Classify>
std::vector<std::uint8_t> fill_marks(int extent, Engine& eng, Classify classify) {
  const auto side = static_cast<std::size_t>(2 * extent + 1);
  const std::size_t count = side * side;
  std::vector<std::uint8_t> marks(count);
  std::size_t i = 0;
  for (; i + 1 < count; i += 2) {
    const std::uint64_t word = eng();
    marks[i] = classify(word & 0xFFFFFFFFULL);
    marks[i + 1] = classify(word >> 32);
  }
  if (i < count) marks[i] = classify(eng() & 0xFFFFFFFFULL);
  // conditioning on an outdoor typical user
  marks[(count - 1) / 2] = 0;
  return marks;
}

}  // namespace

void LatticeConfig::validate() const {
  check_site_area(site_area);
  if (!is_probability(occupancy)) {
    throw ConfigError("occupancy probability must lie in [0, 1], got " + std::to_string(occupancy));
  }
}

void MultiHeightConfig::validate() const {
  check_site_area(site_area);
  if (height_probs.size() < 2) throw ConfigError("multi-height model needs at least one height class");
  if (height_probs.size() > 255) throw ConfigError("too many height classes");
  for (double p : height_probs) {
    if (!is_probability(p)) throw ConfigError("height probability outside [0, 1]: " + std::to_string(p));
  }
  const double total = std::accumulate(height_probs.begin(), height_probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("height probabilities must sum to 1, got " + std::to_string(total));
  }
}

void Window::validate() const {
  if (!(std::isfinite(half_width) && half_width > 0.0)) {
    throw ConfigError("window half width must be positive and finite");
  }
}

int site_extent(double half_width, double site_area) {
  return static_cast<int>(std::floor(half_width / std::sqrt(site_area) + 0.5));
}

SiteSet::SiteSet(int extent) : extent_(extent) {
  if (extent < 0) throw ConfigError("negative site-set extent");
  const auto side = static_cast<std::size_t>(2 * extent + 1);
  bits_.assign(side * side, 0);
}

SiteSet SiteSet::from_sites(const std::vector<SiteIndex>& sites, int min_extent) {
  int extent = min_extent;
  for (const auto& s : sites) extent = std::max({extent, std::abs(s.a), std::abs(s.b)});
  SiteSet set(extent);
  for (const auto& s : sites) set.insert(s);
  return set;
}

void SiteSet::insert(SiteIndex idx) {
  if (idx.a < -extent_ || idx.a > extent_ || idx.b < -extent_ || idx.b > extent_) {
    throw WindowError("site outside site-set extent");
  }
  bits_[offset(idx)] = 1;
}

std::size_t SiteSet::size() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<SiteIndex> SiteSet::sites() const {
  std::vector<SiteIndex> out;
  for (int b = -extent_; b <= extent_; ++b) {
    for (int a = -extent_; a <= extent_; ++a) {
      if (bits_[offset({a, b})] != 0) out.push_back({a, b});
    }
  }
  return out;
}

LatticeRealization::LatticeRealization(double site_area, Window window, int num_heights,
                                       std::vector<std::uint8_t> marks)
    : site_area_(site_area),
      site_side_(std::sqrt(site_area)),
      window_(window),
      extent_(site_extent(window.half_width, site_area)),
      num_heights_(num_heights),
      marks_(std::move(marks)) {
  const auto side = static_cast<std::size_t>(2 * extent_ + 1);
  if (marks_.size() != side * side) throw ConfigError("mark array does not match window extent");
}

int LatticeRealization::mark(SiteIndex idx) const {
  if (idx.a < -extent_ || idx.a > extent_ || idx.b < -extent_ || idx.b > extent_) {
    throw WindowError("site (" + std::to_string(idx.a) + "," + std::to_string(idx.b) + ") outside window");
  }
  const auto side = static_cast<std::size_t>(2 * extent_ + 1);
  return marks_[static_cast<std::size_t>(idx.b + extent_) * side + static_cast<std::size_t>(idx.a + extent_)];
}

LatticeRealization sample_uniform_lattice(const LatticeConfig& config, Window window, Engine& eng) {
  config.validate();
  window.validate();
  const int extent = site_extent(window.half_width, config.site_area);
  const std::uint64_t threshold = probability_threshold(config.occupancy);
  auto marks = fill_marks(extent, eng, [threshold](std::uint64_t u) -> std::uint8_t { return u < threshold ? 1 : 0; });
  return LatticeRealization(config.site_area, window, 1, std::move(marks));
}

LatticeRealization sample_multiheight_lattice(const MultiHeightConfig& config, Window window, Engine& eng) {
  config.validate();
  window.validate();
  const int extent = site_extent(window.half_width, config.site_area);
  const int heights = config.num_heights();
  // cumulative[k-1] = threshold of P(mark in 1..k); with K = 1 this reduces to
  // the uniform sampler's threshold, so both consume and classify identically.
  std::vector<std::uint64_t> cumulative(static_cast<std::size_t>(heights));
  double mass = 0.0;
  for (int k = 1; k <= heights; ++k) {
    mass += config.height_probs[static_cast<std::size_t>(k)];
    cumulative[static_cast<std::size_t>(k - 1)] = probability_threshold(mass);
  }
  auto marks = fill_marks(extent, eng, [&cumulative](std::uint64_t u) -> std::uint8_t {
    for (std::size_t k = 0; k < cumulative.size(); ++k) {
      if (u < cumulative[k]) return static_cast<std::uint8_t>(k + 1);
    }
    return 0;
  });
  return LatticeRealization(config.site_area, window, heights, std::move(marks));
}

SiteSet blocking_sites_for_tier(const LatticeRealization& lat, int k) {
  if (k < 1 || k > lat.num_heights()) {
    throw ConfigError("tier index " + std::to_string(k) + " outside 1.." + std::to_string(lat.num_heights()));
  }
  SiteSet set(lat.extent());
  auto& bits = set.raw();
  const auto& marks = lat.marks();
  for (std::size_t i = 0; i < marks.size(); ++i) {
    bits[i] = (marks[i] >= 1 && marks[i] <= k) ? 1 : 0;
  }
  return set;
}

PointSet sample_ppp(double density, Window window, Engine& eng) {
  if (!(std::isfinite(density) && density >= 0.0)) {
    throw ConfigError("BS density must be non-negative, got " + std::to_string(density));
  }
  window.validate();
  PointSet out{{}, density, window};
  const double width = 2.0 * window.half_width;
  const double mean = density * width * width;
  if (mean <= 0.0) return out;
  std::poisson_distribution<long> count_dist(mean);
  const long count = count_dist(eng);
  out.points.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const double x = (uniform01(eng) - 0.5) * width;
    const double y = (uniform01(eng) - 0.5) * width;
    out.points.push_back({x, y});
  }
  return out;
}

}  // namespace mmwave
