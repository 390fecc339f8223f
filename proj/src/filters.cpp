#include "lumaforge/filters.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "lumaforge/error.hpp"

namespace lumaforge {

namespace {

using Offset = std::ptrdiff_t;

std::uint8_t padded(const PixelBuffer& f, Offset r, Offset c) {
  if (r < 0 || c < 0 || r >= static_cast<Offset>(f.rows()) || c >= static_cast<Offset>(f.cols())) {
    return 0;
  }
  return f.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

// Odd-sized scratch only; returns the middle order statistic.
std::uint8_t middle(std::vector<std::uint8_t>& values) {
  auto mid = values.begin() + static_cast<Offset>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

std::uint8_t median3(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

}  // namespace

void FilterWindow::validate() const {
  if (k == 0 || l == 0 || k % 2 == 0 || l % 2 == 0) {
    throw ConfigError("filter window must have odd positive sides, got " + std::to_string(k) +
                      "x" + std::to_string(l));
  }
}

std::string_view to_string(FilterKind kind) {
  return kind == FilterKind::median ? "median" : "hybrid_median";
}

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "median") return FilterKind::median;
  if (name == "hybrid_median" || name == "hmf") return FilterKind::hybrid_median;
  throw ConfigError("unknown filter type '" + std::string(name) + "'");
}

PixelBuffer median_filter(const PixelBuffer& frame, FilterWindow win) {
  win.validate();
  const Offset hr = static_cast<Offset>(win.k / 2);
  const Offset hc = static_cast<Offset>(win.l / 2);
  PixelBuffer out(frame.dims());
  std::vector<std::uint8_t> window;
  window.reserve(win.k * win.l);
  for (Offset r = 0; r < static_cast<Offset>(frame.rows()); ++r) {
    for (Offset c = 0; c < static_cast<Offset>(frame.cols()); ++c) {
      window.clear();
      for (Offset dr = -hr; dr <= hr; ++dr) {
        for (Offset dc = -hc; dc <= hc; ++dc) window.push_back(padded(frame, r + dr, c + dc));
      }
      out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = middle(window);
    }
  }
  return out;
}

PixelBuffer hybrid_median_filter(const PixelBuffer& frame, FilterWindow win) {
  win.validate();
  if (win.k != win.l || win.k < 3) {
    throw ConfigError("hybrid median needs a square window of side >= 3, got " +
                      std::to_string(win.k) + "x" + std::to_string(win.l));
  }
  const Offset h = static_cast<Offset>(win.k / 2);
  PixelBuffer out(frame.dims());
  std::vector<std::uint8_t> plus;
  std::vector<std::uint8_t> cross;
  plus.reserve(2 * win.k - 1);
  cross.reserve(2 * win.k - 1);
  for (Offset r = 0; r < static_cast<Offset>(frame.rows()); ++r) {
    for (Offset c = 0; c < static_cast<Offset>(frame.cols()); ++c) {
      const std::uint8_t centre = padded(frame, r, c);
      plus.assign(1, centre);
      cross.assign(1, centre);
      for (Offset t = 1; t <= h; ++t) {
        plus.push_back(padded(frame, r - t, c));
        plus.push_back(padded(frame, r + t, c));
        plus.push_back(padded(frame, r, c - t));
        plus.push_back(padded(frame, r, c + t));
        cross.push_back(padded(frame, r - t, c - t));
        cross.push_back(padded(frame, r - t, c + t));
        cross.push_back(padded(frame, r + t, c - t));
        cross.push_back(padded(frame, r + t, c + t));
      }
      out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          median3(middle(plus), middle(cross), centre);
    }
  }
  return out;
}

PixelBuffer apply_filter(const PixelBuffer& frame, FilterKind kind, FilterWindow win) {
  return kind == FilterKind::median ? median_filter(frame, win) : hybrid_median_filter(frame, win);
}

ColorBuffer apply_filter(const ColorBuffer& frame, FilterKind kind, FilterWindow win) {
  return merge_channels(apply_filter(extract_channel(frame, Channel::red), kind, win),
                        apply_filter(extract_channel(frame, Channel::green), kind, win),
                        apply_filter(extract_channel(frame, Channel::blue), kind, win));
}

}  // namespace lumaforge
