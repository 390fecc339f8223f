#include "lumaforge/pixel_core.hpp"

#include <algorithm>
#include <sstream>

#include "lumaforge/error.hpp"

namespace lumaforge {

template <typename Sample>
Grid<Sample>::Grid(Dimensions dims, Sample fill) : dims_(dims), samples_(dims.area(), fill) {
  if (!dims.valid()) throw UsageError("frame dimensions must be at least 1x1");
}

template <typename Sample>
Grid<Sample>::Grid(Dimensions dims, std::vector<Sample> samples)
    : dims_(dims), samples_(std::move(samples)) {
  if (!dims.valid()) throw UsageError("frame dimensions must be at least 1x1");
  if (samples_.size() != dims.area()) {
    std::ostringstream msg;
    msg << "sample count " << samples_.size() << " does not match " << dims.rows << "x"
        << dims.cols;
    throw UsageError(msg.str());
  }
}

template class Grid<std::uint8_t>;
template class Grid<Rgb>;

void LumaWeights::validate() const {
  if (a < 0.0 || b < 0.0 || c < 0.0 || !std::isfinite(a + b + c)) {
    throw ConfigError("luma weights must be finite and nonnegative");
  }
  if (std::abs(a + b + c - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "luma weights must sum to 1, got " << (a + b + c);
    throw ConfigError(msg.str());
  }
}

std::uint8_t to_level(double x) {
  return static_cast<std::uint8_t>(std::clamp(round_half_up(x), 0.0, 255.0));
}

PixelBuffer rgb_to_luma(const ColorBuffer& frame, const LumaWeights& weights) {
  weights.validate();
  PixelBuffer out(frame.dims());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Rgb& px = frame[i];
    out[i] = to_level(weights.a * px[0] + weights.b * px[1] + weights.c * px[2]);
  }
  return out;
}

namespace {

template <typename Sample>
Grid<Sample> resize_grid(const Grid<Sample>& frame, Dimensions target) {
  if (!target.valid()) throw UsageError("resize target must be at least 1x1");
  if (target == frame.dims()) return frame;
  Grid<Sample> out(target);
  for (std::size_t r = 0; r < target.rows; ++r) {
    const std::size_t sr = r * frame.rows() / target.rows;
    for (std::size_t c = 0; c < target.cols; ++c) {
      out.at(r, c) = frame.at(sr, c * frame.cols() / target.cols);
    }
  }
  return out;
}

}  // namespace

PixelBuffer resize_nearest(const PixelBuffer& frame, Dimensions target) {
  return resize_grid(frame, target);
}

ColorBuffer resize_nearest(const ColorBuffer& frame, Dimensions target) {
  return resize_grid(frame, target);
}

PixelBuffer extract_channel(const ColorBuffer& frame, Channel channel) {
  const auto k = static_cast<std::size_t>(channel);
  PixelBuffer out(frame.dims());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = frame[i][k];
  return out;
}

ColorBuffer merge_channels(const PixelBuffer& red, const PixelBuffer& green,
                           const PixelBuffer& blue) {
  if (red.dims() != green.dims() || red.dims() != blue.dims()) {
    throw UsageError("channel planes differ in dimensions");
  }
  ColorBuffer out(red.dims());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Rgb{red[i], green[i], blue[i]};
  return out;
}

ColorBuffer to_color(const PixelBuffer& frame) {
  ColorBuffer out(frame.dims());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = Rgb{frame[i], frame[i], frame[i]};
  return out;
}

}  // namespace lumaforge
