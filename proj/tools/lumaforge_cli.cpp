// lumaforge: frame enhancement command line.
//
//   lumaforge [--config cfg.json] [--seed N] [--jobs N] <subcommand> [flags]
//
// Exit codes: 0 success, 1 usage/config error, 2 ingestion error, 3 stage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lumaforge/equalize.hpp"
#include "lumaforge/error.hpp"
#include "lumaforge/filters.hpp"
#include "lumaforge/metrics.hpp"
#include "lumaforge/netpbm.hpp"
#include "lumaforge/noise.hpp"
#include "lumaforge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lumaforge;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIngest = 2, kStage = 3 };

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
};

struct Settings {
  PipelineConfig cfg;
  std::uint64_t seed = 0;
};

// --seed, then the config's seed, then LUMAFORGE_SEED, then 0.
Settings load_settings(const Globals& g) {
  Settings s;
  bool config_has_seed = false;
  if (!g.config_path.empty()) {
    std::ifstream is(g.config_path);
    if (!is) throw ConfigError("cannot open config " + g.config_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(g.config_path + ": " + e.what());
    }
    s.cfg = config_from_json(doc);
    config_has_seed = doc.is_object() && doc.contains("seed");
  }
  if (g.seed) {
    s.seed = *g.seed;
  } else if (config_has_seed) {
    s.seed = s.cfg.seed;
  } else if (const char* env = std::getenv("LUMAFORGE_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      s.seed = std::stoull(env, &used, 0);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("LUMAFORGE_SEED is not an unsigned integer: ") + env);
    }
  }
  s.cfg.seed = s.seed;
  return s;
}

void warn_noise(const NoiseSpec& spec) {
  if (auto w = spec.warning()) std::cerr << "warning: " << *w << "\n";
}

Dimensions parse_dims(const std::string& text) {
  // <cols>x<rows>, as in "176x144"
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    const std::size_t cols = std::stoul(text.substr(0, x));
    const std::size_t rows = std::stoul(text.substr(x + 1));
    if (rows == 0 || cols == 0) throw std::invalid_argument(text);
    return {rows, cols};
  } catch (const std::exception&) {
    throw ConfigError("size must look like <cols>x<rows>, got '" + text + "'");
  }
}

void print_psnr(const std::string& label, const PsnrResult& r) {
  nlohmann::json j;
  j["mse"] = r.mse;
  j["psnr_db"] = r.infinite() ? nlohmann::json("inf") : nlohmann::json(r.psnr_db);
  std::cout << (label.empty() ? j.dump() : nlohmann::json{{label, j}}.dump()) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame luminance enhancement toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Noise seed (overrides config and LUMAFORGE_SEED)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.fallthrough();

  std::string input;
  std::string output;

  auto* luma = app.add_subcommand("luma", "Convert a colour frame to luminance");
  std::vector<double> weights;
  luma->add_option("-i,--input", input, "Input PPM/PGM")->required();
  luma->add_option("-o,--output", output, "Output PGM")->required();
  luma->add_option("--weights", weights, "Red, green, blue weights")->expected(3);

  auto* noise = app.add_subcommand("noise", "Inject seeded noise");
  std::string noise_kind;
  std::optional<double> noise_d;
  noise->add_option("-i,--input", input, "Input PGM/PPM")->required();
  noise->add_option("-o,--output", output, "Output file")->required();
  noise->add_option("--kind", noise_kind, "salt_pepper | gaussian | poisson | speckle");
  noise->add_option("--d", noise_d, "Noise level");

  auto* filter = app.add_subcommand("filter", "Median or hybrid-median smoothing");
  std::string filter_type;
  std::vector<std::size_t> window;
  filter->add_option("-i,--input", input, "Input PGM/PPM")->required();
  filter->add_option("-o,--output", output, "Output file")->required();
  filter->add_option("--type", filter_type, "median | hybrid_median");
  filter->add_option("--window", window, "Window rows and cols (odd)")->expected(2);

  auto* enhance_cmd = app.add_subcommand("enhance", "Histogram-based brightness enhancement");
  std::optional<double> sigma;
  std::string hist_pre;
  std::string hist_post;
  enhance_cmd->add_option("-i,--input", input, "Input PGM/PPM")->required();
  enhance_cmd->add_option("-o,--output", output, "Output file")->required();
  enhance_cmd->add_option("--sigma", sigma, "Additive cumulative weight");
  enhance_cmd->add_option("--hist-pre", hist_pre, "Write input histogram CSV (gray input)");
  enhance_cmd->add_option("--hist-post", hist_post, "Write output histogram CSV (gray input)");

  auto* metrics = app.add_subcommand("metrics", "PSNR between two frames");
  std::string reference;
  std::string candidate;
  std::string hist_out;
  metrics->add_option("reference", reference, "Reference frame")->required();
  metrics->add_option("candidate", candidate, "Frame to evaluate")->required();
  metrics->add_option("--histogram", hist_out, "Also export the candidate's histogram CSV (gray only)");

  auto* run = app.add_subcommand("run", "Full pipeline over a frame directory");
  std::string input_dir;
  std::string output_dir;
  std::string mode;
  std::string resize;
  std::string psnr_reference;
  std::string source_size;
  run->add_option("--input-dir", input_dir, "Directory of <stem>_<index>.<pgm|ppm> frames");
  run->add_option("--output-dir", output_dir, "Output directory");
  run->add_option("--mode", mode, "gray | color | both");
  run->add_option("--resize", resize, "<cols>x<rows>, or 'none'");
  run->add_option("--weights", weights, "Luma weights")->expected(3);
  run->add_option("--noise-kind", noise_kind, "Noise kind, or 'none'");
  run->add_option("--noise-d", noise_d, "Noise level");
  run->add_option("--filter-type", filter_type, "Filter type, or 'none'");
  run->add_option("--window", window, "Filter window rows and cols")->expected(2);
  run->add_option("--sigma", sigma, "Additive cumulative weight");
  run->add_option("--psnr-reference", psnr_reference, "clean | noisy");
  run->add_option("--source-size", source_size, "Source size label for reports");

  auto* report = app.add_subcommand("report", "Tabulate report.json files");
  std::vector<std::string> report_files;
  std::string csv_out;
  std::string text_out;
  report->add_option("reports", report_files, "report.json files")->required();
  report->add_option("--csv", csv_out, "Write CSV table");
  report->add_option("--text", text_out, "Write aligned text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    Settings s = load_settings(g);
    PipelineConfig& cfg = s.cfg;
    if (!weights.empty()) cfg.luma_weights = {weights[0], weights[1], weights[2]};
    if (sigma) cfg.sigma = *sigma;

    auto noise_stage = [&]() -> std::optional<NoiseStage> {
      if (noise_kind == "none") return std::nullopt;
      std::optional<NoiseStage> stage = cfg.noise;
      if (!noise_kind.empty()) {
        if (!stage) stage = NoiseStage{};
        stage->kind = parse_noise_kind(noise_kind);
      }
      if (noise_d) {
        if (!stage) throw ConfigError("--d/--noise-d given without a noise kind");
        stage->d = *noise_d;
      }
      return stage;
    };
    auto filter_stage = [&]() -> std::optional<FilterStage> {
      if (filter_type == "none") return std::nullopt;
      std::optional<FilterStage> stage = cfg.filter;
      if (!filter_type.empty()) {
        if (!stage) stage = FilterStage{};
        stage->kind = parse_filter_kind(filter_type);
      }
      if (!window.empty()) {
        if (!stage) stage = FilterStage{};
        stage->window = {window[0], window[1]};
      }
      return stage;
    };

    if (*luma) {
      cfg.luma_weights.validate();
      netpbm::write(output, rgb_to_luma(netpbm::read_color(input), cfg.luma_weights));
    } else if (*noise) {
      auto stage = noise_stage();
      if (!stage) throw ConfigError("noise needs --kind (or a config noise section)");
      const NoiseSpec spec{stage->kind, stage->d, stage->seed.value_or(s.seed)};
      spec.validate();
      warn_noise(spec);
      std::visit([&](const auto& frame) { netpbm::write(output, apply_noise(frame, spec)); },
                 netpbm::read(input));
    } else if (*filter) {
      const FilterStage stage = filter_stage().value_or(FilterStage{});
      stage.window.validate();
      std::visit(
          [&](const auto& frame) { netpbm::write(output, apply_filter(frame, stage.kind, stage.window)); },
          netpbm::read(input));
    } else if (*enhance_cmd) {
      const netpbm::Image img = netpbm::read(input);
      if (const auto* gray = std::get_if<PixelBuffer>(&img)) {
        const Enhancement e = enhance_detailed(*gray, cfg.sigma);
        netpbm::write(output, e.output);
        if (!hist_pre.empty()) export_histogram(e.input_histogram, hist_pre);
        if (!hist_post.empty()) export_histogram(histogram(e.output), hist_post);
      } else {
        const auto& color = std::get<ColorBuffer>(img);
        const ColorBuffer out = enhance_color(color, cfg.sigma);
        netpbm::write(output, out);
        if (!hist_pre.empty()) export_histogram(histogram(rgb_to_luma(color, cfg.luma_weights)), hist_pre);
        if (!hist_post.empty()) export_histogram(histogram(rgb_to_luma(out, cfg.luma_weights)), hist_post);
      }
    } else if (*metrics) {
      const netpbm::Image a = netpbm::read(reference);
      const netpbm::Image b = netpbm::read(candidate);
      if (a.index() != b.index()) throw UsageError("cannot compare a PGM with a PPM");
      if (const auto* ga = std::get_if<PixelBuffer>(&a)) {
        const auto& gb = std::get<PixelBuffer>(b);
        print_psnr("", psnr(*ga, gb));
        if (!hist_out.empty()) export_histogram(histogram(gb), hist_out);
      } else {
        print_psnr("", psnr(std::get<ColorBuffer>(a), std::get<ColorBuffer>(b)));
      }
    } else if (*run) {
      if (!input_dir.empty()) cfg.input_dir = input_dir;
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      if (!mode.empty()) {
        nlohmann::json patch = {{"mode", mode}};
        cfg.mode = config_from_json(patch).mode;
      }
      if (resize == "none") {
        cfg.resize_to.reset();
      } else if (!resize.empty()) {
        cfg.resize_to = parse_dims(resize);
      }
      if (!psnr_reference.empty()) {
        nlohmann::json patch = {{"psnr_reference", psnr_reference}};
        cfg.psnr_reference = config_from_json(patch).psnr_reference;
      }
      if (!source_size.empty()) cfg.source_size = source_size;
      cfg.noise = noise_stage();
      cfg.filter = filter_stage();
      cfg.validate();
      if (cfg.noise) warn_noise(NoiseSpec{cfg.noise->kind, cfg.noise->d, 0});
      const MetricsReport r = run_pipeline(cfg, RunOptions{g.jobs});
      std::cout << report_to_json(r).dump(2) << "\n";
    } else if (*report) {
      std::vector<MetricsReport> reports;
      for (const auto& path : report_files) {
        std::ifstream is(path);
        if (!is) throw IngestError(path + ": cannot open report");
        try {
          reports.push_back(report_from_json(nlohmann::json::parse(is)));
        } catch (const nlohmann::json::parse_error& e) {
          throw IngestError(path + ": " + e.what());
        }
      }
      const ReportTable table = report_table(reports);
      if (!csv_out.empty()) std::ofstream(csv_out, std::ios::binary) << table.csv;
      if (!text_out.empty()) std::ofstream(text_out, std::ios::binary) << table.text;
      std::cout << table.text;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IngestError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return kIngest;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStage;
  }
  return kOk;
}
