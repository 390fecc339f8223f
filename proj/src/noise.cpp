#include "lumaforge/noise.hpp"

#include <algorithm>
#include <cmath>

#include "lumaforge/error.hpp"
#include "lumaforge/rng.hpp"

namespace lumaforge {

namespace {

constexpr std::uint64_t stream_of(NoiseKind kind) { return static_cast<std::uint64_t>(kind) + 1; }

template <typename Fn>
PixelBuffer per_site(const PixelBuffer& frame, NoiseKind kind, std::uint64_t seed, Fn&& fn) {
  PixelBuffer out(frame.dims());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    rng::SiteStream stream(seed, stream_of(kind), i);
    out[i] = fn(frame[i], stream);
  }
  return out;
}

std::uint8_t sample_truncated_poisson(double lambda, rng::SiteStream& stream) {
  if (lambda <= 0.0) return 0;
  const double u = stream.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  int k = 0;
  while (u >= cdf && k < 255) {
    ++k;
    p *= lambda / k;
    cdf += p;
  }
  return static_cast<std::uint8_t>(k);
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::salt_pepper: return "salt_pepper";
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::poisson: return "poisson";
    case NoiseKind::speckle: return "speckle";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "salt_pepper" || name == "salt & pepper") return NoiseKind::salt_pepper;
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "poisson" || name == "poison") return NoiseKind::poisson;
  if (name == "speckle") return NoiseKind::speckle;
  throw ConfigError("unknown noise kind '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  if (!std::isfinite(d)) throw ConfigError("noise level d must be finite");
  switch (kind) {
    case NoiseKind::salt_pepper:
      if (d < 0.0 || d > 1.0) throw ConfigError("salt_pepper density d must lie in [0, 1]");
      break;
    case NoiseKind::gaussian:
    case NoiseKind::speckle:
      if (d < 0.0) throw ConfigError(std::string(to_string(kind)) + " variance d must be >= 0");
      break;
    case NoiseKind::poisson:
      break;
  }
}

std::optional<std::string> NoiseSpec::warning() const {
  if (kind == NoiseKind::poisson && d != 0.0) {
    return "poisson noise is signal-dependent; level d is ignored";
  }
  return std::nullopt;
}

PixelBuffer apply_noise(const PixelBuffer& frame, const NoiseSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case NoiseKind::salt_pepper: return salt_pepper(frame, spec.d, spec.seed);
    case NoiseKind::gaussian: return gaussian(frame, spec.d, spec.seed);
    case NoiseKind::poisson: return poisson(frame, spec.seed);
    case NoiseKind::speckle: return speckle(frame, spec.d, spec.seed);
  }
  return frame;
}

ColorBuffer apply_noise(const ColorBuffer& frame, const NoiseSpec& spec) {
  spec.validate();
  NoiseSpec channel_spec = spec;
  PixelBuffer planes[3];
  for (std::size_t k = 0; k < 3; ++k) {
    channel_spec.seed = rng::derive_seed(spec.seed, k);
    planes[k] = apply_noise(extract_channel(frame, static_cast<Channel>(k)), channel_spec);
  }
  return merge_channels(planes[0], planes[1], planes[2]);
}

PixelBuffer salt_pepper(const PixelBuffer& frame, double d, std::uint64_t seed) {
  if (d < 0.0 || d > 1.0) throw ConfigError("salt_pepper density d must lie in [0, 1]");
  if (d == 0.0) return frame;
  return per_site(frame, NoiseKind::salt_pepper, seed,
                  [d](std::uint8_t x, rng::SiteStream& s) -> std::uint8_t {
                    const double u = s.uniform();
                    if (u < d / 2) return 0;
                    if (u < d) return 255;
                    return x;
                  });
}

PixelBuffer gaussian(const PixelBuffer& frame, double d, std::uint64_t seed) {
  if (d < 0.0) throw ConfigError("gaussian variance d must be >= 0");
  if (d == 0.0) return frame;
  const double sd = std::sqrt(d);
  return per_site(frame, NoiseKind::gaussian, seed,
                  [sd](std::uint8_t x, rng::SiteStream& s) {
                    const double v = std::clamp(x / 255.0 + sd * s.normal(), 0.0, 1.0);
                    return to_level(255.0 * v);
                  });
}

PixelBuffer poisson(const PixelBuffer& frame, std::uint64_t seed) {
  return per_site(frame, NoiseKind::poisson, seed, [](std::uint8_t x, rng::SiteStream& s) {
    return sample_truncated_poisson(static_cast<double>(x), s);
  });
}

PixelBuffer speckle(const PixelBuffer& frame, double d, std::uint64_t seed) {
  if (d < 0.0) throw ConfigError("speckle variance d must be >= 0");
  if (d == 0.0) return frame;
  const double half_width = std::sqrt(3.0 * d);
  return per_site(frame, NoiseKind::speckle, seed,
                  [half_width](std::uint8_t x, rng::SiteStream& s) {
                    const double n = (2.0 * s.uniform() - 1.0) * half_width;
                    const double v = std::clamp(x / 255.0 * (1.0 + n), 0.0, 1.0);
                    return to_level(255.0 * v);
                  });
}

}  // namespace lumaforge
