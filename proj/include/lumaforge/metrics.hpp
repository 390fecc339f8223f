#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>

#include "lumaforge/equalize.hpp"
#include "lumaforge/pixel_core.hpp"

namespace lumaforge {

struct PsnrResult {
  double mse = 0.0;
  double psnr_db = std::numeric_limits<double>::infinity();

  bool infinite() const noexcept { return psnr_db == std::numeric_limits<double>::infinity(); }
  static PsnrResult from_mse(double mse);
};

// Sum of squared 8-bit differences, kept in integers so pooled totals do not
// depend on accumulation order.
struct ErrorTally {
  std::uint64_t squared_error = 0;
  std::uint64_t samples = 0;

  ErrorTally& operator+=(const ErrorTally& other) noexcept {
    squared_error += other.squared_error;
    samples += other.samples;
    return *this;
  }
  double mse() const;
  PsnrResult psnr() const { return PsnrResult::from_mse(mse()); }
};

ErrorTally error_tally(const PixelBuffer& a, const PixelBuffer& b);
ErrorTally error_tally(const ColorBuffer& a, const ColorBuffer& b);

double mse_gray(const PixelBuffer& a, const PixelBuffer& b);
PsnrResult psnr(const PixelBuffer& a, const PixelBuffer& b);
PsnrResult psnr(const ColorBuffer& a, const ColorBuffer& b);

// (color_db - gray_db) / color_db * 100. Throws UsageError when color_db is 0.
double improvement_pct(double gray_db, double color_db);

// CSV with header "level,count,probability" and one row per level.
std::string histogram_csv(const Histogram& hist);
void export_histogram(const Histogram& hist, const std::filesystem::path& path);
Histogram parse_histogram_csv(const std::string& text);
Histogram load_histogram(const std::filesystem::path& path);

}  // namespace lumaforge
