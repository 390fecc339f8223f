#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "lumaforge/pixel_core.hpp"

namespace lumaforge {

inline constexpr std::size_t kLevels = 256;

// Normalized per-level occupancy. When built from a frame the integer counts
// are kept alongside the mass so downstream sums can be done exactly.
class Histogram {
 public:
  static Histogram from_counts(const std::array<std::uint64_t, kLevels>& counts);
  // Arbitrary mass vector (e.g. all zero); carries no counts.
  static Histogram from_mass(const std::array<double, kLevels>& mass);

  const std::array<double, kLevels>& mass() const noexcept { return mass_; }
  const std::array<std::uint64_t, kLevels>& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }
  bool has_counts() const noexcept { return total_ > 0; }

  double sum() const noexcept;

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::array<double, kLevels> mass_{};
  std::array<std::uint64_t, kLevels> counts_{};
  std::uint64_t total_ = 0;
};

// Constant additive per-level weight; sigma = 0 gives the plain cumulative histogram.
struct WeightVector {
  double sigma = 0.0;

  double at(std::size_t /*level*/) const noexcept { return sigma; }
};

struct CumulativeDistribution {
  std::array<double, kLevels> cdf{};
};

struct LevelMap {
  std::array<std::uint8_t, kLevels> map{};

  static LevelMap identity();
  std::uint8_t operator[](std::size_t level) const { return map[level]; }
};

struct MassGrouping {
  std::array<double, kLevels> group{};

  double sum() const noexcept;
};

Histogram histogram(const PixelBuffer& frame);

CumulativeDistribution cumulative(const Histogram& hist, const WeightVector& weights = {});

// map[l] = clamp(floor(cdf[l] * 255 + 0.5), 0, 255)
LevelMap quantize_levels(const CumulativeDistribution& cdf);

// group[i] = total mass of the input levels that map to i.
MassGrouping group_mass(const Histogram& hist, const LevelMap& map);

PixelBuffer apply_map(const PixelBuffer& frame, const LevelMap& map);

struct Enhancement {
  PixelBuffer output;
  Histogram input_histogram;
  CumulativeDistribution cdf;
  LevelMap map;
  MassGrouping grouping;
};

Enhancement enhance_detailed(const PixelBuffer& frame, double sigma = 0.0);
PixelBuffer enhance(const PixelBuffer& frame, double sigma = 0.0);

// Equalizes R, G and B planes independently.
ColorBuffer enhance_color(const ColorBuffer& frame, double sigma = 0.0);

}  // namespace lumaforge
