#pragma once

#include <cstdint>

namespace lumaforge::rng {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t value) noexcept {
  return mix64(key ^ (mix64(value + 0x9E3779B97F4A7C15ULL) + 0x632BE59BD9B4E019ULL));
}

// Counter-based stream: the sequence drawn at a site is a pure function of
// (seed, stream, site), so the draw order across sites never matters.
class SiteStream {
 public:
  constexpr SiteStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t site) noexcept
      : key_(combine(combine(seed, stream), site)) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // Uniform on [0, 1) with 53 bits of resolution.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1].
  constexpr double uniform_open_low() noexcept { return 1.0 - uniform(); }

  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Derives a child seed, e.g. one per frame or per colour channel.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return combine(seed ^ 0xD1B54A32D192ED03ULL, index);
}

}  // namespace lumaforge::rng
