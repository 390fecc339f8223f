#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lumaforge/error.hpp"
#include "lumaforge/pipeline.hpp"

namespace lumaforge {

using nlohmann::json;

namespace {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::gray: return "gray";
    case Mode::color: return "color";
    case Mode::both: return "both";
  }
  return "both";
}

Mode parse_mode(const std::string& s) {
  if (s == "gray") return Mode::gray;
  if (s == "color") return Mode::color;
  if (s == "both") return Mode::both;
  throw ConfigError("mode must be one of gray, color, both; got '" + s + "'");
}

PsnrReference parse_reference(const std::string& s) {
  if (s == "clean") return PsnrReference::clean;
  if (s == "noisy") return PsnrReference::noisy;
  throw ConfigError("psnr_reference must be 'clean' or 'noisy'; got '" + s + "'");
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + field + "': " + e.what());
  }
}

std::size_t positive_size(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1) {
    throw ConfigError("config field '" + field + "' must be a positive integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

void PipelineConfig::validate() const {
  if (resize_to && !resize_to->valid()) throw ConfigError("resize_to must be at least 1x1");
  luma_weights.validate();
  if (noise) NoiseSpec{noise->kind, noise->d, 0}.validate();
  if (filter) {
    filter->window.validate();
    if (filter->kind == FilterKind::hybrid_median &&
        (filter->window.k != filter->window.l || filter->window.k < 3)) {
      throw ConfigError("hybrid_median needs a square window of side >= 3");
    }
  }
  if (!std::isfinite(sigma)) throw ConfigError("sigma must be finite");
}

json PipelineConfig::processing_json() const {
  json j;
  j["resize_to"] = resize_to ? json{{"rows", resize_to->rows}, {"cols", resize_to->cols}} : json(nullptr);
  j["luma_weights"] = json::array({luma_weights.a, luma_weights.b, luma_weights.c});
  if (noise) {
    j["noise"] = {{"kind", std::string(lumaforge::to_string(noise->kind))}, {"d", noise->d}};
    j["noise"]["seed"] = noise->seed ? json(*noise->seed) : json(nullptr);
  } else {
    j["noise"] = nullptr;
  }
  if (filter) {
    j["filter"] = {{"type", std::string(lumaforge::to_string(filter->kind))},
                   {"window", json::array({filter->window.k, filter->window.l})}};
  } else {
    j["filter"] = nullptr;
  }
  j["sigma"] = sigma;
  j["mode"] = std::string(to_string(mode));
  j["seed"] = seed;
  j["psnr_reference"] = psnr_reference == PsnrReference::clean ? "clean" : "noisy";
  j["source_size"] = source_size ? json(*source_size) : json(nullptr);
  return j;
}

std::string PipelineConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : processing_json().dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json config_to_json(const PipelineConfig& cfg) {
  json j = cfg.processing_json();
  j["input_dir"] = cfg.input_dir.string();
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

PipelineConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"input_dir", "output_dir", "resize_to", "luma_weights", "noise", "filter",
                  "sigma", "mode", "seed", "psnr_reference", "source_size"},
                 "config");
  PipelineConfig cfg;
  if (doc.contains("input_dir")) cfg.input_dir = get_as<std::string>(doc["input_dir"], "input_dir");
  if (doc.contains("output_dir")) {
    cfg.output_dir = get_as<std::string>(doc["output_dir"], "output_dir");
  }
  if (doc.contains("resize_to")) {
    const json& r = doc["resize_to"];
    if (r.is_null()) {
      cfg.resize_to.reset();
    } else {
      if (!r.is_object()) throw ConfigError("resize_to must be {\"rows\":..,\"cols\":..} or null");
      reject_unknown(r, {"rows", "cols"}, "resize_to");
      if (!r.contains("rows") || !r.contains("cols")) {
        throw ConfigError("resize_to needs both rows and cols");
      }
      cfg.resize_to = Dimensions{positive_size(r["rows"], "resize_to.rows"),
                                 positive_size(r["cols"], "resize_to.cols")};
    }
  }
  if (doc.contains("luma_weights")) {
    const json& w = doc["luma_weights"];
    if (w.is_array() && w.size() == 3) {
      cfg.luma_weights = {get_as<double>(w[0], "luma_weights"), get_as<double>(w[1], "luma_weights"),
                          get_as<double>(w[2], "luma_weights")};
    } else if (w.is_object()) {
      reject_unknown(w, {"a", "b", "c"}, "luma_weights");
      cfg.luma_weights = {get_as<double>(w.at("a"), "luma_weights.a"),
                          get_as<double>(w.at("b"), "luma_weights.b"),
                          get_as<double>(w.at("c"), "luma_weights.c")};
    } else {
      throw ConfigError("luma_weights must be [a, b, c] or {\"a\":..,\"b\":..,\"c\":..}");
    }
  }
  if (doc.contains("noise") && !doc["noise"].is_null()) {
    const json& n = doc["noise"];
    if (!n.is_object() || !n.contains("kind")) throw ConfigError("noise needs a 'kind'");
    reject_unknown(n, {"kind", "d", "seed"}, "noise");
    NoiseStage stage;
    stage.kind = parse_noise_kind(get_as<std::string>(n["kind"], "noise.kind"));
    if (n.contains("d")) stage.d = get_as<double>(n["d"], "noise.d");
    if (n.contains("seed") && !n["seed"].is_null()) {
      if (!n["seed"].is_number_unsigned()) throw ConfigError("noise.seed must be a nonnegative integer");
      stage.seed = n["seed"].get<std::uint64_t>();
    }
    cfg.noise = stage;
  }
  if (doc.contains("filter") && !doc["filter"].is_null()) {
    const json& f = doc["filter"];
    if (!f.is_object() || !f.contains("type")) throw ConfigError("filter needs a 'type'");
    reject_unknown(f, {"type", "window"}, "filter");
    FilterStage stage;
    stage.kind = parse_filter_kind(get_as<std::string>(f["type"], "filter.type"));
    if (f.contains("window")) {
      const json& w = f["window"];
      if (!w.is_array() || w.size() != 2) throw ConfigError("filter.window must be [k, l]");
      stage.window = {positive_size(w[0], "filter.window"), positive_size(w[1], "filter.window")};
    }
    cfg.filter = stage;
  }
  if (doc.contains("sigma")) cfg.sigma = get_as<double>(doc["sigma"], "sigma");
  if (doc.contains("mode")) cfg.mode = parse_mode(get_as<std::string>(doc["mode"], "mode"));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("psnr_reference")) {
    cfg.psnr_reference = parse_reference(get_as<std::string>(doc["psnr_reference"], "psnr_reference"));
  }
  if (doc.contains("source_size") && !doc["source_size"].is_null()) {
    cfg.source_size = get_as<std::string>(doc["source_size"], "source_size");
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace lumaforge
