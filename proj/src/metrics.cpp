#include "lumaforge/metrics.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lumaforge/error.hpp"

namespace lumaforge {

PsnrResult PsnrResult::from_mse(double mse) {
  if (mse == 0.0) return {};
  return {mse, 10.0 * std::log10(255.0 * 255.0 / mse)};
}

double ErrorTally::mse() const {
  if (samples == 0) throw UsageError("mean squared error over zero samples");
  return static_cast<double>(squared_error) / static_cast<double>(samples);
}

namespace {

template <typename Sample, typename Fn>
ErrorTally tally(const Grid<Sample>& a, const Grid<Sample>& b, Fn&& per_sample) {
  if (a.dims() != b.dims()) {
    throw UsageError("frame dimensions differ: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
  ErrorTally t;
  for (std::size_t i = 0; i < a.size(); ++i) per_sample(a[i], b[i], t);
  return t;
}

void add_sq(int x, int y, ErrorTally& t) {
  const auto d = static_cast<std::int64_t>(x - y);
  t.squared_error += static_cast<std::uint64_t>(d * d);
  ++t.samples;
}

}  // namespace

ErrorTally error_tally(const PixelBuffer& a, const PixelBuffer& b) {
  return tally(a, b, [](std::uint8_t x, std::uint8_t y, ErrorTally& t) { add_sq(x, y, t); });
}

ErrorTally error_tally(const ColorBuffer& a, const ColorBuffer& b) {
  return tally(a, b, [](const Rgb& x, const Rgb& y, ErrorTally& t) {
    for (std::size_t k = 0; k < 3; ++k) add_sq(x[k], y[k], t);
  });
}

double mse_gray(const PixelBuffer& a, const PixelBuffer& b) { return error_tally(a, b).mse(); }

PsnrResult psnr(const PixelBuffer& a, const PixelBuffer& b) { return error_tally(a, b).psnr(); }

PsnrResult psnr(const ColorBuffer& a, const ColorBuffer& b) { return error_tally(a, b).psnr(); }

double improvement_pct(double gray_db, double color_db) {
  if (color_db == 0.0) throw UsageError("improvement percentage undefined for colour PSNR of 0 dB");
  return (color_db - gray_db) / color_db * 100.0;
}

std::string histogram_csv(const Histogram& hist) {
  std::string out = "level,count,probability\n";
  char line[96];
  for (std::size_t k = 0; k < kLevels; ++k) {
    std::snprintf(line, sizeof line, "%zu,%" PRIu64 ",%.17g\n", k, hist.counts()[k], hist.mass()[k]);
    out += line;
  }
  return out;
}

void export_histogram(const Histogram& hist, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << histogram_csv(hist);
  if (!os.flush()) throw std::runtime_error("failed writing " + path.string());
}

Histogram parse_histogram_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "level,count,probability") {
    throw UsageError("histogram CSV: missing 'level,count,probability' header");
  }
  std::array<std::uint64_t, kLevels> counts{};
  std::array<double, kLevels> mass{};
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t level = 0;
    std::uint64_t count = 0;
    double prob = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%" SCNu64 ",%lf", &level, &count, &prob) != 3 ||
        level != rows || rows >= kLevels) {
      throw UsageError("histogram CSV: malformed row " + std::to_string(rows + 1) + ": " + line);
    }
    counts[level] = count;
    mass[level] = prob;
    ++rows;
  }
  if (rows != kLevels) {
    throw UsageError("histogram CSV: expected " + std::to_string(kLevels) + " rows, got " +
                     std::to_string(rows));
  }
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total > 0 ? Histogram::from_counts(counts) : Histogram::from_mass(mass);
}

Histogram load_histogram(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_histogram_csv(ss.str());
}

}  // namespace lumaforge
