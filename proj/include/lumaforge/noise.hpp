#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lumaforge/pixel_core.hpp"

namespace lumaforge {

enum class NoiseKind { salt_pepper, gaussian, poisson, speckle };

std::string_view to_string(NoiseKind kind);
// Also accepts "salt & pepper" and "poison". Throws ConfigError otherwise.
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::salt_pepper;
  double d = 0.0;  // density for salt_pepper, variance for gaussian/speckle, unused for poisson
  std::uint64_t seed = 0;

  void validate() const;
  // Non-fatal notes about the spec, currently only "d is ignored for poisson".
  std::optional<std::string> warning() const;
};

PixelBuffer apply_noise(const PixelBuffer& frame, const NoiseSpec& spec);

PixelBuffer salt_pepper(const PixelBuffer& frame, double d, std::uint64_t seed);
PixelBuffer gaussian(const PixelBuffer& frame, double d, std::uint64_t seed);
PixelBuffer poisson(const PixelBuffer& frame, std::uint64_t seed);
PixelBuffer speckle(const PixelBuffer& frame, double d, std::uint64_t seed);

// Noises R, G, B independently with seeds derived from spec.seed.
ColorBuffer apply_noise(const ColorBuffer& frame, const NoiseSpec& spec);

}  // namespace lumaforge
