#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autojournal/chunker.hpp"
#include "autojournal/ingest.hpp"
#include "autojournal/journal.hpp"
#include "autojournal/video.hpp"

namespace autojournal::pipeline {

struct VideoSection {
  double fps = 30.0;
  std::string encoder_path;  // empty: bundled autojournal-encode
  bool lossless = false;
  bool timestamp_overlay = false;
  std::optional<video::Resolution> resolution;
  // {out_dir}, {participant} and {date} are substituted.
  std::string path_pattern = "{out_dir}/videos/{participant}/{date}.mp4";
};

struct ModelSection {
  std::string provider = "mock";  // mock | http
  std::string endpoint;
  std::string model = "default";
  std::string api_key_env = "MODEL_API_KEY";
  std::filesystem::path mock_dir;  // default <config dir>/fixtures/mock_responses
  std::optional<std::filesystem::path> prompts_dir;
  std::size_t parallelism = 4;
  double rpm = 60;
  double temperature = 0.0;
  double top_p = 1.0;
  int retries = 3;
  int retry_base_delay_ms = 1000;
  double chunk_timeout_s = 120;
  double video_timeout_s = 600;
  std::size_t max_payload_bytes = 20'000'000;
  std::size_t max_video_payload_bytes = 2'000'000'000;
};

struct EvalSection {
  std::string provider = "stub";  // stub | http
  std::string endpoint;           // EMBED_ENDPOINT overrides
  std::size_t stub_dim = 256;
  std::size_t max_batch = 128;
};

struct RunConfig {
  std::filesystem::path config_dir;
  std::vector<std::string> participants;
  std::vector<std::string> dates;
  std::vector<journal::StreamTag> streams;
  int default_utc_offset_minutes = 0;
  std::map<std::string, int> utc_offset_minutes;  // per participant

  std::filesystem::path screenshots_dir;   // <dir>/<participant>/<date>/
  std::filesystem::path ground_truth_dir;  // <dir>/<participant>/<date>.json
  std::filesystem::path out_dir;

  ingest::IngestOptions ingest;
  // Drop frames captured outside the participant's local calendar day.
  bool restrict_to_day = true;
  chunking::ChunkLimits chunk;
  VideoSection video;
  ModelSection model;
  EvalSection eval;
  std::size_t jobs = 1;

  int utc_offset_for(const std::string& participant) const;
};

// Replaces ${NAME} and ${NAME:-fallback} with environment values. Throws
// Error(ConfigError) for an unset variable without a fallback.
std::string interpolate_env(const std::string& text);

// YAML; relative paths resolve against the config file's directory.
// Throws Error(ConfigError).
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& yaml_text, const std::filesystem::path& config_dir);

}  // namespace autojournal::pipeline
