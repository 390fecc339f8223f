#include "lumaforge/equalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lumaforge/error.hpp"

namespace lumaforge {

Histogram Histogram::from_counts(const std::array<std::uint64_t, kLevels>& counts) {
  Histogram h;
  h.counts_ = counts;
  h.total_ = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (h.total_ == 0) throw UsageError("histogram counts are all zero");
  for (std::size_t k = 0; k < kLevels; ++k) {
    h.mass_[k] = static_cast<double>(counts[k]) / static_cast<double>(h.total_);
  }
  return h;
}

Histogram Histogram::from_mass(const std::array<double, kLevels>& mass) {
  Histogram h;
  h.mass_ = mass;
  return h;
}

double Histogram::sum() const noexcept {
  return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

LevelMap LevelMap::identity() {
  LevelMap m;
  for (std::size_t l = 0; l < kLevels; ++l) m.map[l] = static_cast<std::uint8_t>(l);
  return m;
}

double MassGrouping::sum() const noexcept {
  return std::accumulate(group.begin(), group.end(), 0.0);
}

Histogram histogram(const PixelBuffer& frame) {
  if (frame.size() == 0) throw UsageError("histogram of an empty frame");
  std::array<std::uint64_t, kLevels> counts{};
  for (std::uint8_t v : frame.samples()) ++counts[v];
  return Histogram::from_counts(counts);
}

CumulativeDistribution cumulative(const Histogram& hist, const WeightVector& weights) {
  CumulativeDistribution out;
  // With counts available the running sum is taken in integers, so cdf[l] is
  // the correctly rounded quotient and cdf[255] is exactly 1.
  std::uint64_t running_count = 0;
  double running_mass = 0.0;
  double running_weight = 0.0;
  for (std::size_t l = 0; l < kLevels; ++l) {
    double mass_part;
    if (hist.has_counts()) {
      running_count += hist.counts()[l];
      mass_part = static_cast<double>(running_count) / static_cast<double>(hist.total());
    } else {
      running_mass += hist.mass()[l];
      mass_part = running_mass;
    }
    running_weight += weights.at(l);
    out.cdf[l] = mass_part + running_weight;
  }
  return out;
}

LevelMap quantize_levels(const CumulativeDistribution& cdf) {
  // A count-derived cdf is a ratio of integers, so an exact .5 product can land
  // one ulp low after the division; the 1e-9 nudge keeps those ties rounding up.
  constexpr double kTieSlack = 1e-9;
  LevelMap out;
  for (std::size_t l = 0; l < kLevels; ++l) {
    const double scaled = std::floor(cdf.cdf[l] * static_cast<double>(kLevels - 1) + 0.5 + kTieSlack);
    out.map[l] = static_cast<std::uint8_t>(std::clamp(scaled, 0.0, static_cast<double>(kLevels - 1)));
  }
  return out;
}

MassGrouping group_mass(const Histogram& hist, const LevelMap& map) {
  MassGrouping out;
  for (std::size_t l = 0; l < kLevels; ++l) out.group[map[l]] += hist.mass()[l];
  return out;
}

PixelBuffer apply_map(const PixelBuffer& frame, const LevelMap& map) {
  PixelBuffer out(frame.dims());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = map[frame[i]];
  return out;
}

Enhancement enhance_detailed(const PixelBuffer& frame, double sigma) {
  Histogram hist = histogram(frame);
  CumulativeDistribution cdf = cumulative(hist, WeightVector{sigma});
  LevelMap map = quantize_levels(cdf);
  MassGrouping grouping = group_mass(hist, map);
  PixelBuffer output = apply_map(frame, map);
  return {std::move(output), std::move(hist), cdf, map, grouping};
}

PixelBuffer enhance(const PixelBuffer& frame, double sigma) {
  return enhance_detailed(frame, sigma).output;
}

ColorBuffer enhance_color(const ColorBuffer& frame, double sigma) {
  return merge_channels(enhance(extract_channel(frame, Channel::red), sigma),
                        enhance(extract_channel(frame, Channel::green), sigma),
                        enhance(extract_channel(frame, Channel::blue), sigma));
}

}  // namespace lumaforge
