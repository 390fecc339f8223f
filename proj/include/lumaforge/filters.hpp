#pragma once

#include <cstddef>
#include <string_view>

#include "lumaforge/pixel_core.hpp"

namespace lumaforge {

// k rows by l cols, both odd. Out-of-frame window positions read as 0.
struct FilterWindow {
  std::size_t k = 3;
  std::size_t l = 3;

  void validate() const;
};

enum class FilterKind { median, hybrid_median };

std::string_view to_string(FilterKind kind);
FilterKind parse_filter_kind(std::string_view name);

PixelBuffer median_filter(const PixelBuffer& frame, FilterWindow win = {});

// Median of {plus-neighbourhood median, X-neighbourhood median, centre}.
// Requires a square window of side >= 3.
PixelBuffer hybrid_median_filter(const PixelBuffer& frame, FilterWindow win = {});

PixelBuffer apply_filter(const PixelBuffer& frame, FilterKind kind, FilterWindow win);
// Filters each colour channel independently.
ColorBuffer apply_filter(const ColorBuffer& frame, FilterKind kind, FilterWindow win);

}  // namespace lumaforge
