#include "lumaforge/rng.hpp"

#include <cmath>
#include <numbers>

namespace lumaforge::rng {

// Box-Muller, cosine branch only. Hand-rolled so outputs do not depend on the
// standard library's distribution implementation.
double SiteStream::normal() noexcept {
  const double u1 = uniform_open_low();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace lumaforge::rng
