#include "autojournal/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "autojournal/error.hpp"
#include "autojournal/timefmt.hpp"

namespace autojournal::pipeline {

namespace fs = std::filesystem;

int RunConfig::utc_offset_for(const std::string& participant) const {
  const auto it = utc_offset_minutes.find(participant);
  return it == utc_offset_minutes.end() ? default_utc_offset_minutes : it->second;
}

std::string interpolate_env(const std::string& text) {
  static const std::regex re(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)(:-([^}]*))?\})");
  std::string out;
  auto last = text.cbegin();
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(last, m[0].first);
    const char* value = std::getenv(m[1].str().c_str());
    if (value != nullptr) {
      out += value;
    } else if (m[2].matched) {
      out += m[3].str();
    } else {
      throw Error(ErrorCode::ConfigError, "environment variable " + m[1].str() + " is not set");
    }
    last = m[0].second;
  }
  out.append(last, text.cend());
  return out;
}

namespace {

// Scalars pass through env interpolation before conversion.
template <typename T>
T get(const YAML::Node& node, const char* key, T fallback) {
  if (!node || !node.IsMap()) return fallback;
  const auto child = node[key];
  if (!child || child.IsNull()) return fallback;
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      return interpolate_env(child.as<std::string>());
    } else if constexpr (std::is_same_v<T, bool>) {
      const std::string s = interpolate_env(child.as<std::string>());
      if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
      if (s == "false" || s == "no" || s == "off" || s == "0") return false;
      throw Error(ErrorCode::ConfigError, std::string(key) + ": expected a boolean, got \"" + s + "\"");
    } else {
      return YAML::Load(interpolate_env(child.as<std::string>())).as<T>();
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, std::string(key) + ": " + e.what());
  }
}

std::vector<std::string> get_list(const YAML::Node& node, const char* key) {
  std::vector<std::string> out;
  const auto child = node[key];
  if (!child) return out;
  if (!child.IsSequence()) throw Error(ErrorCode::ConfigError, std::string(key) + " must be a list");
  for (const auto& item : child) out.push_back(interpolate_env(item.as<std::string>()));
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text, const fs::path& config_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  if (!root.IsMap()) throw Error(ErrorCode::ConfigError, "config must be a mapping");

  RunConfig cfg;
  cfg.config_dir = config_dir;
  cfg.participants = get_list(root, "participants");
  cfg.dates = get_list(root, "dates");
  for (const auto& s : get_list(root, "streams")) {
    const auto tag = journal::parse_stream_tag(s);
    if (!tag || *tag == journal::StreamTag::GroundTruth) {
      throw Error(ErrorCode::ConfigError, "streams: unknown stream \"" + s + "\" (text|video)");
    }
    if (std::find(cfg.streams.begin(), cfg.streams.end(), *tag) == cfg.streams.end()) cfg.streams.push_back(*tag);
  }
  if (cfg.participants.empty()) throw Error(ErrorCode::ConfigError, "participants: at least one required");
  if (cfg.dates.empty()) throw Error(ErrorCode::ConfigError, "dates: at least one required");
  if (cfg.streams.empty()) throw Error(ErrorCode::ConfigError, "streams: at least one required");
  if (std::set<std::string>(cfg.participants.begin(), cfg.participants.end()).size() != cfg.participants.size()) {
    throw Error(ErrorCode::ConfigError, "participants: duplicate id");
  }
  for (const auto& d : cfg.dates) {
    if (!parse_date(d)) throw Error(ErrorCode::ConfigError, "dates: not a YYYY-MM-DD date: " + d);
  }

  if (const auto tz = root["utc_offset_minutes"]) {
    if (tz.IsMap()) {
      for (const auto& kv : tz) cfg.utc_offset_minutes[kv.first.as<std::string>()] = kv.second.as<int>();
    } else {
      cfg.default_utc_offset_minutes = tz.as<int>();
    }
  }

  const auto paths = root["paths"];
  cfg.screenshots_dir = resolve(config_dir, get<std::string>(paths, "screenshots", "screenshots"));
  cfg.ground_truth_dir = resolve(config_dir, get<std::string>(paths, "ground_truth", "ground_truth"));
  cfg.out_dir = resolve(config_dir, get<std::string>(root, "out_dir", get<std::string>(paths, "out_dir", "out")));
  cfg.jobs = get<std::size_t>(root, "jobs", 1);

  const auto ingest = root["ingest"];
  cfg.ingest.timestamp_rule.pattern = get<std::string>(ingest, "timestamp_pattern", cfg.ingest.timestamp_rule.pattern);
  try {
    std::regex probe(cfg.ingest.timestamp_rule.pattern);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("ingest.timestamp_pattern: ") + e.what());
  }
  cfg.ingest.dedup_threshold = get<double>(ingest, "dedup_threshold", 1.0);
  if (!(cfg.ingest.dedup_threshold > 0.0 && cfg.ingest.dedup_threshold <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "ingest.dedup_threshold must lie in (0, 1]");
  }
  cfg.ingest.interval_s = get<double>(ingest, "interval_s", 3.0);
  cfg.ingest.dimension_tolerance_px = get<int>(ingest, "dimension_tolerance_px", 0);
  cfg.ingest.workers = get<std::size_t>(ingest, "workers", 1);
  cfg.restrict_to_day = get<bool>(ingest, "restrict_to_day", true);

  const auto chunk = root["chunk"];
  cfg.chunk.max_images = get<std::size_t>(chunk, "max_images", cfg.chunk.max_images);
  cfg.chunk.max_bytes = get<std::size_t>(chunk, "max_bytes", cfg.chunk.max_bytes);
  if (cfg.chunk.max_images < 1) throw Error(ErrorCode::ConfigError, "chunk.max_images must be >= 1");

  const auto video = root["video"];
  cfg.video.fps = get<double>(video, "fps", 30.0);
  if (!(cfg.video.fps > 0)) throw Error(ErrorCode::ConfigError, "video.fps must be positive");
  cfg.video.encoder_path = get<std::string>(video, "encoder_path", "");
  cfg.video.lossless = get<bool>(video, "lossless", false);
  cfg.video.timestamp_overlay = get<bool>(video, "timestamp_overlay", false);
  cfg.video.path_pattern = get<std::string>(video, "path_pattern", cfg.video.path_pattern);
  if (video && video["width"] && video["height"]) {
    cfg.video.resolution = video::Resolution{get<int>(video, "width", 0), get<int>(video, "height", 0)};
    if (cfg.video.resolution->width <= 0 || cfg.video.resolution->height <= 0) {
      throw Error(ErrorCode::ConfigError, "video.width/height must be positive");
    }
  }

  const auto model = root["model"];
  cfg.model.provider = get<std::string>(model, "provider", "mock");
  if (cfg.model.provider != "mock" && cfg.model.provider != "http") {
    throw Error(ErrorCode::ConfigError, "model.provider must be mock or http");
  }
  cfg.model.endpoint = get<std::string>(model, "endpoint", "");
  if (cfg.model.provider == "http" && cfg.model.endpoint.empty()) {
    throw Error(ErrorCode::ConfigError, "model.endpoint is required for the http provider");
  }
  cfg.model.model = get<std::string>(model, "model", "default");
  cfg.model.api_key_env = get<std::string>(model, "api_key_env", "MODEL_API_KEY");
  cfg.model.mock_dir = resolve(config_dir, get<std::string>(model, "mock_dir", "fixtures/mock_responses"));
  if (const auto p = get<std::string>(model, "prompts_dir", ""); !p.empty()) cfg.model.prompts_dir = resolve(config_dir, p);
  cfg.model.parallelism = get<std::size_t>(model, "parallelism", 4);
  cfg.model.rpm = get<double>(model, "rpm", 60);
  cfg.model.temperature = get<double>(model, "temperature", 0.0);
  cfg.model.top_p = get<double>(model, "top_p", 1.0);
  cfg.model.retries = get<int>(model, "retries", 3);
  cfg.model.retry_base_delay_ms = get<int>(model, "retry_base_delay_ms", 1000);
  cfg.model.chunk_timeout_s = get<double>(model, "chunk_timeout_s", 120);
  cfg.model.video_timeout_s = get<double>(model, "video_timeout_s", 600);
  cfg.model.max_payload_bytes = get<std::size_t>(model, "max_payload_bytes", 20'000'000);
  cfg.model.max_video_payload_bytes = get<std::size_t>(model, "max_video_payload_bytes", 2'000'000'000);

  const auto eval = root["eval"];
  cfg.eval.provider = get<std::string>(eval, "provider", "stub");
  if (cfg.eval.provider != "stub" && cfg.eval.provider != "http") {
    throw Error(ErrorCode::ConfigError, "eval.provider must be stub or http");
  }
  cfg.eval.endpoint = get<std::string>(eval, "endpoint", "");
  if (const char* env = std::getenv("EMBED_ENDPOINT"); env != nullptr && *env != '\0') cfg.eval.endpoint = env;
  if (cfg.eval.provider == "http" && cfg.eval.endpoint.empty()) {
    throw Error(ErrorCode::ConfigError, "eval.endpoint (or EMBED_ENDPOINT) is required for the http provider");
  }
  cfg.eval.stub_dim = get<std::size_t>(eval, "stub_dim", 256);
  if (cfg.eval.stub_dim == 0) throw Error(ErrorCode::ConfigError, "eval.stub_dim must be positive");
  cfg.eval.max_batch = get<std::size_t>(eval, "max_batch", 128);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), fs::absolute(path).parent_path());
}

}  // namespace autojournal::pipeline
