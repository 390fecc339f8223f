#include "lumaforge/pipeline.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include "lumaforge/error.hpp"
#include "lumaforge/netpbm.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace lumaforge {
namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("lumaforge_pipeline_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

void write_sequence(const fs::path& dir, std::size_t n, Dimensions dims, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "clip_%03zu.ppm", i);
    netpbm::write(dir / name, testing::random_color_frame(gen, dims));
  }
}

PipelineConfig base_config(const fs::path& in, const fs::path& out) {
  PipelineConfig cfg;
  cfg.input_dir = in;
  cfg.output_dir = out;
  cfg.resize_to = Dimensions{12, 16};
  cfg.noise = NoiseStage{NoiseKind::salt_pepper, 0.05, std::nullopt};
  cfg.filter = FilterStage{FilterKind::median, {3, 3}};
  cfg.seed = 17;
  return cfg;
}

TEST(Ingest, OrdersByNumericIndex) {
  TempDir tmp;
  for (int i : {10, 9, 0, 1, 2, 3, 4, 5, 6, 7, 8}) {
    netpbm::write(tmp.path() / ("f_" + std::to_string(i) + ".pgm"),
                  PixelBuffer(Dimensions{2, 2}, static_cast<std::uint8_t>(i)));
  }
  const FrameSequence seq = ingest_frames(tmp.path());
  EXPECT_EQ(seq.name, "f");
  ASSERT_EQ(seq.frames.size(), 11u);
  for (std::size_t i = 0; i < 11; ++i) {
    EXPECT_EQ(seq.source_manifest[i].first, i);
    EXPECT_EQ(seq.frames[i][0][0], i);
  }
}

TEST(Ingest, ThreePaddedFrames) {
  TempDir tmp;
  write_sequence(tmp.path(), 3, {4, 5}, 1);
  std::ofstream(tmp.path() / "notes.txt") << "ignored";
  const FrameSequence seq = ingest_frames(tmp.path());
  ASSERT_EQ(seq.frames.size(), 3u);
  EXPECT_EQ(seq.source_manifest[2].second, "clip_002.ppm");
}

TEST(Ingest, PromotesGrayFrames) {
  TempDir tmp;
  netpbm::write(tmp.path() / "cam_000.pgm", PixelBuffer(Dimensions{144, 176}, std::uint8_t{90}));
  const FrameSequence seq = ingest_frames(tmp.path());
  ASSERT_EQ(seq.frames.size(), 1u);
  EXPECT_EQ(seq.frames[0], ColorBuffer(Dimensions{144, 176}, Rgb{90, 90, 90}));
}

TEST(Ingest, MismatchedDimsNameTheFile) {
  TempDir tmp;
  netpbm::write(tmp.path() / "v_000.pgm", PixelBuffer(Dimensions{144, 176}));
  netpbm::write(tmp.path() / "v_001.pgm", PixelBuffer(Dimensions{144, 176}));
  netpbm::write(tmp.path() / "v_002.pgm", PixelBuffer(Dimensions{288, 352}));
  netpbm::write(tmp.path() / "v_003.pgm", PixelBuffer(Dimensions{288, 352}));
  try {
    ingest_frames(tmp.path());
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_NE(std::string(e.what()).find("v_002.pgm"), std::string::npos) << e.what();
  }
}

TEST(Ingest, RejectsGapsMixedStemsAndEmptyDirs) {
  {
    TempDir tmp;
    EXPECT_THROW(ingest_frames(tmp.path()), IngestError);
    EXPECT_THROW(ingest_frames(tmp.path() / "missing"), IngestError);
  }
  {
    TempDir tmp;
    netpbm::write(tmp.path() / "a_000.pgm", PixelBuffer(Dimensions{1, 1}));
    netpbm::write(tmp.path() / "a_002.pgm", PixelBuffer(Dimensions{1, 1}));
    EXPECT_THROW(ingest_frames(tmp.path()), IngestError);
  }
  {
    TempDir tmp;
    netpbm::write(tmp.path() / "a_000.pgm", PixelBuffer(Dimensions{1, 1}));
    netpbm::write(tmp.path() / "b_001.pgm", PixelBuffer(Dimensions{1, 1}));
    EXPECT_THROW(ingest_frames(tmp.path()), IngestError);
  }
  {
    TempDir tmp;
    std::ofstream(tmp.path() / "a_000.pgm") << "garbage";
    EXPECT_THROW(ingest_frames(tmp.path()), IngestError);
  }
}

TEST(Run, ConstantFramesEnhanceToWhite) {
  TempDir tmp;
  const fs::path in = tmp.path() / "in";
  fs::create_directories(in);
  for (int i = 0; i < 3; ++i) {
    netpbm::write(in / ("k_00" + std::to_string(i) + ".ppm"), ColorBuffer(Dimensions{6, 8}, Rgb{40, 80, 120}));
  }
  PipelineConfig cfg;
  cfg.input_dir = in;
  cfg.output_dir = tmp.path() / "out";
  cfg.resize_to.reset();
  const MetricsReport r = run_pipeline(cfg);
  EXPECT_EQ(r.n_frames, 3u);
  ASSERT_TRUE(r.gray_psnr_db && r.color_psnr_db && r.improvement_pct);
  EXPECT_TRUE(std::isfinite(*r.gray_psnr_db));
  EXPECT_TRUE(std::isfinite(*r.color_psnr_db));
  for (int i = 0; i < 3; ++i) {
    const std::string stem = "k_00" + std::to_string(i);
    EXPECT_EQ(std::get<PixelBuffer>(netpbm::read(cfg.output_dir / "gray" / (stem + ".pgm"))),
              PixelBuffer(Dimensions{6, 8}, std::uint8_t{255}));
    EXPECT_EQ(std::get<ColorBuffer>(netpbm::read(cfg.output_dir / "color" / (stem + ".ppm"))),
              ColorBuffer(Dimensions{6, 8}, Rgb{255, 255, 255}));
    EXPECT_TRUE(fs::exists(cfg.output_dir / "histograms" / (stem + "_pre.csv")));
    EXPECT_TRUE(fs::exists(cfg.output_dir / "histograms" / (stem + "_post.csv")));
  }
  const auto doc = nlohmann::json::parse(slurp(cfg.output_dir / "report.json"));
  EXPECT_EQ(doc["sample_name"], "k");
  EXPECT_EQ(doc["n_frames"], 3);
  EXPECT_EQ(doc["pipeline_config_digest"], cfg.digest());
}

TEST(Run, IdenticalConfigIsByteIdenticalAcrossWorkerCounts) {
  TempDir tmp;
  write_sequence(tmp.path() / "in", 9, {20, 24}, 5);
  PipelineConfig a = base_config(tmp.path() / "in", tmp.path() / "a");
  PipelineConfig b = base_config(tmp.path() / "in", tmp.path() / "b");
  run_pipeline(a, RunOptions{1});
  run_pipeline(b, RunOptions{4});
  const auto ta = tree(a.output_dir);
  EXPECT_EQ(ta.size(), 9u * 4 + 1);
  EXPECT_EQ(ta, tree(b.output_dir));

  PipelineConfig c = base_config(tmp.path() / "in", tmp.path() / "c");
  c.seed = 18;
  run_pipeline(c);
  EXPECT_NE(ta.at("gray/clip_000.pgm"), tree(c.output_dir).at("gray/clip_000.pgm"));
}

TEST(Run, InputsAreNeverModified) {
  TempDir tmp;
  write_sequence(tmp.path() / "in", 4, {10, 10}, 6);
  const auto before = tree(tmp.path() / "in");
  PipelineConfig cfg = base_config(tmp.path() / "in", tmp.path() / "out");
  cfg.noise = NoiseStage{NoiseKind::gaussian, 0.01, 3};
  run_pipeline(cfg, RunOptions{2});
  EXPECT_EQ(tree(tmp.path() / "in"), before);
}

TEST(Run, ModesControlOutputsAndMetrics) {
  TempDir tmp;
  write_sequence(tmp.path() / "in", 2, {8, 8}, 7);
  PipelineConfig gray = base_config(tmp.path() / "in", tmp.path() / "g");
  gray.mode = Mode::gray;
  const MetricsReport rg = run_pipeline(gray);
  EXPECT_TRUE(rg.gray_psnr_db.has_value());
  EXPECT_FALSE(rg.color_psnr_db.has_value());
  EXPECT_FALSE(rg.improvement_pct.has_value());
  EXPECT_FALSE(fs::exists(gray.output_dir / "color"));

  PipelineConfig color = base_config(tmp.path() / "in", tmp.path() / "c");
  color.mode = Mode::color;
  const MetricsReport rc = run_pipeline(color);
  EXPECT_FALSE(rc.gray_psnr_db.has_value());
  EXPECT_TRUE(rc.color_psnr_db.has_value());
  EXPECT_EQ(tree(color.output_dir).size(), 2u * 3 + 1);
}

TEST(Run, NoisyReferenceDiffersFromClean) {
  TempDir tmp;
  write_sequence(tmp.path() / "in", 2, {16, 16}, 8);
  PipelineConfig clean = base_config(tmp.path() / "in", tmp.path() / "a");
  clean.filter.reset();
  PipelineConfig noisy = clean;
  noisy.output_dir = tmp.path() / "b";
  noisy.psnr_reference = PsnrReference::noisy;
  EXPECT_NE(run_pipeline(clean).gray_psnr_db, run_pipeline(noisy).gray_psnr_db);
}

TEST(Run, StageFailureRemovesPartialOutputs) {
  TempDir tmp;
  write_sequence(tmp.path() / "in", 5, {8, 8}, 9);
  PipelineConfig cfg = base_config(tmp.path() / "in", tmp.path() / "out");
  cfg.mode = Mode::gray;
  // A directory where frame 3's output file should go makes that write fail.
  fs::create_directories(cfg.output_dir / "gray" / "clip_003.pgm");
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.frame_index(), 3u);
  }
  EXPECT_FALSE(fs::exists(cfg.output_dir / "gray" / "clip_000.pgm"));
  EXPECT_FALSE(fs::exists(cfg.output_dir / "histograms" / "clip_000_pre.csv"));
  EXPECT_FALSE(fs::exists(cfg.output_dir / "report.json"));
}

TEST(Config, ParsesDefaultsAndOverrides) {
  const PipelineConfig d = config_from_json(nlohmann::json{{"input_dir", "i"}, {"output_dir", "o"}});
  ASSERT_TRUE(d.resize_to.has_value());
  EXPECT_EQ(*d.resize_to, (Dimensions{144, 176}));
  EXPECT_EQ(d.mode, Mode::both);
  EXPECT_EQ(d.sigma, 0.0);
  EXPECT_FALSE(d.noise || d.filter);

  const auto doc = nlohmann::json::parse(R"({
    "input_dir": "frames", "output_dir": "out", "resize_to": null,
    "luma_weights": [0.2126, 0.7152, 0.0722],
    "noise": {"kind": "salt & pepper", "d": 0.05, "seed": 4},
    "filter": {"type": "hybrid_median", "window": [5, 5]},
    "sigma": 0.001, "mode": "gray", "seed": 99, "psnr_reference": "noisy",
    "source_size": "18.1Mb"
  })");
  const PipelineConfig c = config_from_json(doc);
  EXPECT_FALSE(c.resize_to.has_value());
  EXPECT_EQ(c.noise->kind, NoiseKind::salt_pepper);
  EXPECT_EQ(c.noise->seed, 4u);
  EXPECT_EQ(c.filter->kind, FilterKind::hybrid_median);
  EXPECT_EQ(c.filter->window.k, 5u);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.psnr_reference, PsnrReference::noisy);
  EXPECT_EQ(config_from_json(config_to_json(c)).digest(), c.digest());
}

TEST(Config, RejectsInvalidDocuments) {
  using nlohmann::json;
  EXPECT_THROW(config_from_json(json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"mode", "sepia"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"luma_weights", {0.5, 0.5, 0.5}}}), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"noise": {"kind": "salt_pepper", "d": 2}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"filter": {"type": "median", "window": [2, 3]}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"filter": {"type": "hybrid_median", "window": [3, 5]}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"resize_to": {"rows": 0, "cols": 3}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"seed": -1})")), ConfigError);
  EXPECT_THROW(run_pipeline(PipelineConfig{}), ConfigError);
}

TEST(Config, DigestTracksEveryProcessingField) {
  PipelineConfig base = base_config("in", "out");
  const std::string d0 = base.digest();
  std::vector<PipelineConfig> variants(9, base);
  variants[0].resize_to = Dimensions{144, 177};
  variants[1].luma_weights = {0.3, 0.6, 0.1};
  variants[2].noise->d = 0.06;
  variants[3].noise->seed = 1;
  variants[4].filter->kind = FilterKind::hybrid_median;
  variants[5].sigma = 0.5;
  variants[6].mode = Mode::gray;
  variants[7].seed = 18;
  variants[8].psnr_reference = PsnrReference::noisy;
  std::set<std::string> seen{d0};
  for (const auto& v : variants) EXPECT_TRUE(seen.insert(v.digest()).second);
  PipelineConfig moved = base;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(moved.digest(), d0);
  EXPECT_EQ(base_config("in", "out").digest(), d0);
}

MetricsReport pair(const std::string& name, double gray, double color) {
  MetricsReport r;
  r.sample_name = name;
  r.gray_psnr_db = gray;
  r.color_psnr_db = color;
  return r;
}

TEST(ReportJson, RoundTripsInfinityAndNulls) {
  MetricsReport r = pair("s", std::numeric_limits<double>::infinity(), 30.5);
  r.n_frames = 7;
  r.frame_dims = {144, 176};
  const auto j = report_to_json(r);
  EXPECT_EQ(j["gray_psnr_db"], "inf");
  EXPECT_TRUE(j["improvement_pct"].is_null());
  const MetricsReport back = report_from_json(j);
  EXPECT_TRUE(std::isinf(*back.gray_psnr_db));
  EXPECT_EQ(back.color_psnr_db, 30.5);
  EXPECT_EQ(back.frame_dims, r.frame_dims);
}

TEST(ReportTable, PublishedPairsReproduceImprovementColumn) {
  const std::vector<MetricsReport> reports = {
      pair("NAERLS1", 31.95, 36.45), pair("NAERLS2", 22.30, 26.65), pair("NTA1", 17.71, 24.45),
      pair("NTA2", 23.17, 28.90),    pair("Akiyo", 15.06, 21.19),   pair("Foreman", 19.17, 28.06)};
  const ReportTable t = report_table(reports);
  std::istringstream csv(t.csv);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "sample,size,frames,gray_psnr_db,color_psnr_db,improvement_pct");
  std::vector<std::string> improvements;
  while (std::getline(csv, line)) improvements.push_back(line.substr(line.rfind(',') + 1));
  EXPECT_EQ(improvements, (std::vector<std::string>{"12.35", "16.32", "27.57", "19.83", "28.93", "31.68"}));
  EXPECT_NE(t.text.find("NAERLS1"), std::string::npos);
}

TEST(ReportTable, SingleRowAndMissingColour) {
  MetricsReport r = pair("gray_only", 20.0, 0.0);
  r.color_psnr_db.reset();
  r.source_size = "11Mb";
  r.n_frames = 300;
  const ReportTable t = report_table({r});
  EXPECT_EQ(t.csv, "sample,size,frames,gray_psnr_db,color_psnr_db,improvement_pct\n"
                   "gray_only,11Mb,300,20.00,n/a,n/a\n");
  EXPECT_EQ(std::count(t.text.begin(), t.text.end(), '\n'), 3);
}

}  // namespace
}  // namespace lumaforge
