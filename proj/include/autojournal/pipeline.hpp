#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autojournal/config.hpp"
#include "autojournal/embedding.hpp"
#include "autojournal/gateway.hpp"
#include "autojournal/ingest.hpp"
#include "autojournal/report.hpp"
#include "autojournal/video.hpp"

namespace autojournal::pipeline {

struct DayFilter {
  std::optional<std::string> participant;
  std::optional<std::string> date;
  std::optional<journal::StreamTag> stream;
};

struct ManifestEntry {
  std::string participant;
  std::string date;
  journal::StreamTag stream = journal::StreamTag::Text;
  bool ok = false;
  std::string error;
  std::filesystem::path journal_path;
  std::size_t entries = 0;
  std::optional<ingest::IngestStats> ingest;
};

struct RunManifest {
  std::vector<ManifestEntry> entries;  // sorted by (participant, date, stream)

  bool any_failed() const;
  std::string to_json() const;
};

// Seams for tests; anything left null is built from the config.
struct Dependencies {
  std::shared_ptr<gateway::ModelProvider> model_provider;
  std::shared_ptr<video::Encoder> encoder;
  std::shared_ptr<eval::EmbeddingProvider> embedding_provider;
};

std::shared_ptr<gateway::ModelProvider> make_model_provider(const RunConfig& cfg);
std::shared_ptr<eval::EmbeddingProvider> make_embedding_provider(const RunConfig& cfg);
gateway::GatewayOptions gateway_options(const RunConfig& cfg, const std::string& participant);

std::filesystem::path screenshot_dir(const RunConfig& cfg, const std::string& participant, const std::string& date);
std::filesystem::path journal_path(const RunConfig& cfg, const std::string& participant, const std::string& date,
                                   journal::StreamTag stream);
std::filesystem::path ground_truth_path(const RunConfig& cfg, const std::string& participant,
                                        const std::string& date);
std::filesystem::path video_path(const RunConfig& cfg, const std::string& participant, const std::string& date);
std::filesystem::path intermediate_dir(const RunConfig& cfg, const std::string& participant,
                                       const std::string& date);

ingest::IngestOptions ingest_options(const RunConfig& cfg, const std::string& participant, const std::string& date);

// Generates every selected (participant, date, stream) journal. One failing
// day never stops the others; the manifest records each outcome and is
// written to <out_dir>/manifest.json.
RunManifest cmd_generate(const RunConfig& cfg, const DayFilter& filter = {}, Dependencies deps = {});

struct EvaluateResult {
  EvalReport report;
  std::vector<std::string> errors;  // MissingGroundTruth / MissingPrediction / ...
};

// Scores every configured (participant, date, stream) and writes
// <out_dir>/report.csv and <out_dir>/report.txt.
EvaluateResult cmd_evaluate(const RunConfig& cfg, Dependencies deps = {});

std::string cmd_report(const std::filesystem::path& report_csv);

struct InspectRow {
  std::string participant;
  std::string date;
  std::optional<ingest::IngestStats> stats;
  std::string error;
};
std::vector<InspectRow> cmd_inspect(const RunConfig& cfg, const DayFilter& filter = {});

}  // namespace autojournal::pipeline
