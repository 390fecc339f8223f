#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lumaforge {

struct Dimensions {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t area() const noexcept { return rows * cols; }
  bool valid() const noexcept { return rows >= 1 && cols >= 1; }

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

using Rgb = std::array<std::uint8_t, 3>;

// Row-major 2-D grid of samples. Construction enforces the dims/length invariant;
// every operation in the library returns a fresh buffer.
template <typename Sample>
class Grid {
 public:
  using value_type = Sample;

  Grid() = default;
  explicit Grid(Dimensions dims, Sample fill = Sample{});
  Grid(Dimensions dims, std::vector<Sample> samples);

  const Dimensions& dims() const noexcept { return dims_; }
  std::size_t rows() const noexcept { return dims_.rows; }
  std::size_t cols() const noexcept { return dims_.cols; }
  std::size_t size() const noexcept { return samples_.size(); }

  const Sample& at(std::size_t r, std::size_t c) const { return samples_[r * dims_.cols + c]; }
  Sample& at(std::size_t r, std::size_t c) { return samples_[r * dims_.cols + c]; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  Sample& operator[](std::size_t i) { return samples_[i]; }

  std::span<const Sample> samples() const noexcept { return samples_; }
  std::span<Sample> samples() noexcept { return samples_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Dimensions dims_{};
  std::vector<Sample> samples_;
};

using PixelBuffer = Grid<std::uint8_t>;
using ColorBuffer = Grid<Rgb>;

struct LumaWeights {
  double a = 0.299;  // red
  double b = 0.587;  // green
  double c = 0.114;  // blue

  // Throws ConfigError unless each weight is >= 0 and they sum to 1 within 1e-9.
  void validate() const;
};

inline double round_half_up(double x) { return std::floor(x + 0.5); }

// Rounds half up and clamps into [0, 255].
std::uint8_t to_level(double x);

PixelBuffer rgb_to_luma(const ColorBuffer& frame, const LumaWeights& weights = {});

PixelBuffer resize_nearest(const PixelBuffer& frame, Dimensions target);
ColorBuffer resize_nearest(const ColorBuffer& frame, Dimensions target);

enum class Channel : std::size_t { red = 0, green = 1, blue = 2 };

PixelBuffer extract_channel(const ColorBuffer& frame, Channel channel);
ColorBuffer merge_channels(const PixelBuffer& red, const PixelBuffer& green, const PixelBuffer& blue);
// Gray promotion: R = G = B = sample.
ColorBuffer to_color(const PixelBuffer& frame);

}  // namespace lumaforge
