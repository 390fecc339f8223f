#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lumaforge/filters.hpp"
#include "lumaforge/noise.hpp"
#include "lumaforge/pixel_core.hpp"

namespace lumaforge {

enum class Mode { gray, color, both };
enum class PsnrReference { clean, noisy };

struct FilterStage {
  FilterKind kind = FilterKind::median;
  FilterWindow window{};
};

struct NoiseStage {
  NoiseKind kind = NoiseKind::salt_pepper;
  double d = 0.0;
  // Falls back to PipelineConfig::seed when unset.
  std::optional<std::uint64_t> seed;
};

struct PipelineConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  // QCIF, 176 wide by 144 tall.
  std::optional<Dimensions> resize_to = Dimensions{144, 176};
  LumaWeights luma_weights{};
  std::optional<NoiseStage> noise;
  std::optional<FilterStage> filter;
  double sigma = 0.0;
  Mode mode = Mode::both;
  std::uint64_t seed = 0;
  PsnrReference psnr_reference = PsnrReference::clean;
  // Free-form source description carried into reports (e.g. container file size).
  std::optional<std::string> source_size;

  // Throws ConfigError on invalid stage parameters. Does not touch the filesystem.
  void validate() const;

  // Every field except input_dir/output_dir, as canonical JSON.
  nlohmann::json processing_json() const;
  // 16 hex digits, FNV-1a over processing_json().dump().
  std::string digest() const;
};

// Parses a config document. Unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const PipelineConfig& cfg);

struct FrameSequence {
  std::string name;
  std::vector<ColorBuffer> frames;
  // (index, filename), ascending by index.
  std::vector<std::pair<std::size_t, std::string>> source_manifest;
};

// Loads <stem>_<index>.<pgm|ppm> files ordered by numeric index. Throws IngestError.
FrameSequence ingest_frames(const std::filesystem::path& dir);

struct MetricsReport {
  std::string sample_name;
  std::size_t n_frames = 0;
  Dimensions frame_dims{};
  std::string pipeline_config_digest;
  std::optional<double> gray_psnr_db;   // +inf allowed
  std::optional<double> color_psnr_db;  // +inf allowed
  std::optional<double> improvement_pct;
  std::optional<std::string> source_size;
};

// "inf" for infinite PSNR, null for absent values.
nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& doc);

struct RunOptions {
  unsigned jobs = 1;
};

// Writes <output_dir>/{gray,color}/<frame>.{pgm,ppm}, <output_dir>/histograms/<frame>_{pre,post}.csv
// and <output_dir>/report.json. On failure every file written by the run is removed and the
// error is rethrown.
MetricsReport run_pipeline(const PipelineConfig& cfg, const RunOptions& options = {});

// Processes an already ingested sequence; same outputs as run_pipeline.
MetricsReport run_sequence(const FrameSequence& sequence, const PipelineConfig& cfg,
                           const RunOptions& options = {});

struct ReportTable {
  std::string csv;
  std::string text;
};

// Columns: sample, size, frames, gray PSNR, color PSNR, improvement %.
ReportTable report_table(const std::vector<MetricsReport>& reports);

}  // namespace lumaforge
