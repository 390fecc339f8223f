#include "lumaforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "lumaforge/equalize.hpp"
#include "lumaforge/error.hpp"
#include "lumaforge/metrics.hpp"
#include "lumaforge/netpbm.hpp"
#include "lumaforge/rng.hpp"

namespace fs = std::filesystem;

namespace lumaforge {

using nlohmann::json;

FrameSequence ingest_frames(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IngestError(dir.string() + ": not a directory");

  static const std::regex kFrameName(R"(^(.+)_([0-9]+)\.(pgm|ppm)$)");
  struct Entry {
    std::size_t index;
    std::string stem;
    std::string filename;
  };
  std::vector<Entry> entries;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const std::string filename = item.path().filename().string();
    std::smatch m;
    if (!std::regex_match(filename, m, kFrameName)) continue;
    if (m[2].length() > 9) throw IngestError(filename + ": frame index too large");
    entries.push_back({std::stoul(m[2].str()), m[1].str(), filename});
  }
  if (entries.empty()) {
    throw IngestError(dir.string() + ": no frame files named <stem>_<index>.<pgm|ppm>");
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.index != b.index ? a.index < b.index : a.filename < b.filename;
  });

  FrameSequence seq;
  seq.name = entries.front().stem;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    if (e.stem != seq.name) {
      throw IngestError(e.filename + ": stem '" + e.stem + "' differs from sequence '" + seq.name + "'");
    }
    if (e.index != i) {
      throw IngestError(e.filename + ": frame indices must be contiguous from 0 (expected " +
                        std::to_string(i) + ")");
    }
    ColorBuffer frame = netpbm::read_color(dir / e.filename);
    if (!seq.frames.empty() && frame.dims() != seq.frames.front().dims()) {
      throw IngestError(e.filename + ": dimensions " + std::to_string(frame.cols()) + "x" +
                        std::to_string(frame.rows()) + " differ from " +
                        std::to_string(seq.frames.front().cols()) + "x" +
                        std::to_string(seq.frames.front().rows()));
    }
    seq.frames.push_back(std::move(frame));
    seq.source_manifest.emplace_back(e.index, e.filename);
  }
  return seq;
}

namespace {

json db_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

std::optional<double> db_from_json(const json& j, const char* field) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(std::string("report field '") + field + "' must be a number, \"inf\" or null");
  }
  if (!j.is_number()) throw ConfigError(std::string("report field '") + field + "' must be numeric");
  return j.get<double>();
}

std::optional<double> improvement_of(std::optional<double> gray, std::optional<double> color) {
  if (!gray || !color || !std::isfinite(*gray) || !std::isfinite(*color) || *color == 0.0) {
    return std::nullopt;
  }
  return improvement_pct(*gray, *color);
}

struct FrameOutcome {
  ErrorTally gray;
  ErrorTally color;
  std::vector<fs::path> written;
};

class FrameProcessor {
 public:
  FrameProcessor(const FrameSequence& seq, const PipelineConfig& cfg)
      : seq_(seq), cfg_(cfg) {}

  void process(std::size_t index, FrameOutcome& out) const {
    const std::string stem = fs::path(seq_.source_manifest[index].second).stem().string();
    ColorBuffer clean = seq_.frames[index];
    if (cfg_.resize_to) clean = resize_nearest(clean, *cfg_.resize_to);

    std::optional<NoiseSpec> noise;
    if (cfg_.noise) {
      const std::uint64_t base = cfg_.noise->seed.value_or(cfg_.seed);
      noise = NoiseSpec{cfg_.noise->kind, cfg_.noise->d, rng::derive_seed(base, index)};
    }

    std::optional<Histogram> pre;
    std::optional<Histogram> post;
    if (cfg_.mode != Mode::color) {
      const PixelBuffer clean_gray = rgb_to_luma(clean, cfg_.luma_weights);
      const PixelBuffer noisy = noise ? apply_noise(clean_gray, *noise) : clean_gray;
      const PixelBuffer smoothed =
          cfg_.filter ? apply_filter(noisy, cfg_.filter->kind, cfg_.filter->window) : noisy;
      Enhancement e = enhance_detailed(smoothed, cfg_.sigma);
      const PixelBuffer& reference = cfg_.psnr_reference == PsnrReference::clean ? clean_gray : noisy;
      out.gray = error_tally(e.output, reference);
      emit(out, cfg_.output_dir / "gray" / (stem + ".pgm"), netpbm::encode(e.output));
      pre = e.input_histogram;
      post = histogram(e.output);
    }
    if (cfg_.mode != Mode::gray) {
      const ColorBuffer noisy = noise ? apply_noise(clean, *noise) : clean;
      const ColorBuffer smoothed =
          cfg_.filter ? apply_filter(noisy, cfg_.filter->kind, cfg_.filter->window) : noisy;
      const ColorBuffer enhanced = enhance_color(smoothed, cfg_.sigma);
      const ColorBuffer& reference = cfg_.psnr_reference == PsnrReference::clean ? clean : noisy;
      out.color = error_tally(enhanced, reference);
      emit(out, cfg_.output_dir / "color" / (stem + ".ppm"), netpbm::encode(enhanced));
      if (!pre) {
        pre = histogram(rgb_to_luma(smoothed, cfg_.luma_weights));
        post = histogram(rgb_to_luma(enhanced, cfg_.luma_weights));
      }
    }
    emit(out, cfg_.output_dir / "histograms" / (stem + "_pre.csv"), histogram_csv(*pre));
    emit(out, cfg_.output_dir / "histograms" / (stem + "_post.csv"), histogram_csv(*post));
  }

 private:
  static void emit(FrameOutcome& out, const fs::path& path, const std::string& bytes) {
    out.written.push_back(path);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os.flush()) throw std::runtime_error("failed writing " + path.string());
  }

  const FrameSequence& seq_;
  const PipelineConfig& cfg_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << text;
  if (!os.flush()) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

json report_to_json(const MetricsReport& r) {
  json j;
  j["sample_name"] = r.sample_name;
  j["n_frames"] = r.n_frames;
  j["frame_dims"] = {{"rows", r.frame_dims.rows}, {"cols", r.frame_dims.cols}};
  j["pipeline_config_digest"] = r.pipeline_config_digest;
  j["gray_psnr_db"] = db_to_json(r.gray_psnr_db);
  j["color_psnr_db"] = db_to_json(r.color_psnr_db);
  j["improvement_pct"] = db_to_json(r.improvement_pct);
  j["source_size"] = r.source_size ? json(*r.source_size) : json(nullptr);
  return j;
}

MetricsReport report_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("report must be a JSON object");
  MetricsReport r;
  try {
    r.sample_name = doc.at("sample_name").get<std::string>();
    r.n_frames = doc.value("n_frames", std::size_t{0});
    if (doc.contains("frame_dims") && doc["frame_dims"].is_object()) {
      r.frame_dims = {doc["frame_dims"].value("rows", std::size_t{0}),
                      doc["frame_dims"].value("cols", std::size_t{0})};
    }
    r.pipeline_config_digest = doc.value("pipeline_config_digest", std::string{});
    if (doc.contains("source_size") && doc["source_size"].is_string()) {
      r.source_size = doc["source_size"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  r.gray_psnr_db = db_from_json(doc.value("gray_psnr_db", json(nullptr)), "gray_psnr_db");
  r.color_psnr_db = db_from_json(doc.value("color_psnr_db", json(nullptr)), "color_psnr_db");
  r.improvement_pct = db_from_json(doc.value("improvement_pct", json(nullptr)), "improvement_pct");
  return r;
}

MetricsReport run_sequence(const FrameSequence& seq, const PipelineConfig& cfg,
                           const RunOptions& options) {
  cfg.validate();
  if (cfg.output_dir.empty()) throw ConfigError("output_dir is required");
  if (seq.frames.empty()) throw IngestError("sequence '" + seq.name + "' has no frames");

  fs::create_directories(cfg.output_dir);
  if (cfg.mode != Mode::color) fs::create_directories(cfg.output_dir / "gray");
  if (cfg.mode != Mode::gray) fs::create_directories(cfg.output_dir / "color");
  fs::create_directories(cfg.output_dir / "histograms");

  const std::size_t n = seq.frames.size();
  std::vector<FrameOutcome> outcomes(n);
  const FrameProcessor processor(seq, cfg);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::map<std::size_t, std::string> errors;

  auto worker = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        processor.process(i, outcomes[i]);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        errors.emplace(i, e.what());
        failed = true;
      }
    }
  };
  {
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(n)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  if (!errors.empty()) {
    for (const auto& o : outcomes) {
      for (const auto& p : o.written) {
        std::error_code ec;
        fs::remove(p, ec);
      }
    }
    const auto& [index, what] = *errors.begin();
    throw StageError(index, what);
  }

  ErrorTally gray;
  ErrorTally color;
  for (const auto& o : outcomes) {
    gray += o.gray;
    color += o.color;
  }

  MetricsReport report;
  report.sample_name = seq.name;
  report.n_frames = n;
  report.frame_dims = cfg.resize_to.value_or(seq.frames.front().dims());
  report.pipeline_config_digest = cfg.digest();
  if (cfg.mode != Mode::color) report.gray_psnr_db = gray.psnr().psnr_db;
  if (cfg.mode != Mode::gray) report.color_psnr_db = color.psnr().psnr_db;
  report.improvement_pct = improvement_of(report.gray_psnr_db, report.color_psnr_db);
  report.source_size = cfg.source_size;

  try {
    write_text(cfg.output_dir / "report.json", report_to_json(report).dump(2) + "\n");
  } catch (const std::exception& e) {
    for (const auto& o : outcomes) {
      for (const auto& p : o.written) {
        std::error_code ec;
        fs::remove(p, ec);
      }
    }
    throw StageError(n, e.what());
  }
  return report;
}

MetricsReport run_pipeline(const PipelineConfig& cfg, const RunOptions& options) {
  cfg.validate();
  if (cfg.input_dir.empty()) throw ConfigError("input_dir is required");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir is required");
  return run_sequence(ingest_frames(cfg.input_dir), cfg, options);
}

namespace {

std::string fmt_db(const std::optional<double>& v) {
  if (!v) return "n/a";
  if (std::isinf(*v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace

ReportTable report_table(const std::vector<MetricsReport>& reports) {
  const std::vector<std::string> header = {"sample", "size", "frames", "gray_psnr_db",
                                           "color_psnr_db", "improvement_pct"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    std::optional<double> improvement = improvement_of(r.gray_psnr_db, r.color_psnr_db);
    if (!improvement) improvement = r.improvement_pct;
    rows.push_back({r.sample_name, r.source_size.value_or("n/a"), std::to_string(r.n_frames),
                    fmt_db(r.gray_psnr_db), fmt_db(r.color_psnr_db), fmt_db(improvement)});
  }

  ReportTable table;
  auto csv_line = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    return line + "\n";
  };
  table.csv = csv_line(header);
  for (const auto& row : rows) table.csv += csv_line(row);

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  auto text_line = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string pad(width[c] - cells[c].size(), ' ');
      // Sample name left-aligned, numbers right-aligned.
      line += c == 0 ? cells[c] + pad : pad + cells[c];
      if (c + 1 < cells.size()) line += "  ";
    }
    return line + "\n";
  };
  table.text = text_line(header);
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) rule += std::string(width[c], '-') + (c + 1 < width.size() ? "  " : "");
  table.text += rule + "\n";
  for (const auto& row : rows) table.text += text_line(row);
  return table;
}

}  // namespace lumaforge
