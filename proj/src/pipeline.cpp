#include "autojournal/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>

#include <json.hpp>

#include "autojournal/chunker.hpp"
#include "autojournal/error.hpp"
#include "autojournal/parallel.hpp"
#include "autojournal/timefmt.hpp"

namespace autojournal::pipeline {

namespace fs = std::filesystem;
using journal::StreamTag;
using ojson = nlohmann::ordered_json;

namespace {

std::string substitute(std::string pattern, const std::string& key, const std::string& value) {
  const std::string needle = "{" + key + "}";
  for (auto pos = pattern.find(needle); pos != std::string::npos; pos = pattern.find(needle, pos + value.size())) {
    pattern.replace(pos, needle.size(), value);
  }
  return pattern;
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::WriteFailed, path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw Error(ErrorCode::WriteFailed, path.string());
}

int stream_rank(StreamTag s) { return s == StreamTag::Text ? 0 : 1; }

template <typename T>
bool selected(const std::optional<T>& want, const T& value) {
  return !want || *want == value;
}

ojson stats_json(const ingest::IngestStats& s) {
  return {{"total_found", s.total_found},
          {"invalid_dropped", s.invalid_dropped},
          {"duplicates_dropped", s.duplicates_dropped},
          {"retained", s.retained}};
}

}  // namespace

bool RunManifest::any_failed() const {
  return std::any_of(entries.begin(), entries.end(), [](const ManifestEntry& e) { return !e.ok; });
}

std::string RunManifest::to_json() const {
  ojson list = ojson::array();
  std::size_t failed = 0;
  for (const auto& e : entries) {
    ojson item = {{"participant", e.participant},
                  {"date", e.date},
                  {"stream", std::string(journal::to_string(e.stream))},
                  {"status", e.ok ? "ok" : "failed"}};
    if (e.ok) {
      item["journal"] = e.journal_path.generic_string();
      item["entries"] = e.entries;
    } else {
      item["error"] = e.error;
      ++failed;
    }
    if (e.ingest) item["ingest"] = stats_json(*e.ingest);
    list.push_back(std::move(item));
  }
  ojson root = {{"total", entries.size()}, {"failed", failed}, {"entries", std::move(list)}};
  return root.dump(2, ' ', false, ojson::error_handler_t::replace) + "\n";
}

std::shared_ptr<gateway::ModelProvider> make_model_provider(const RunConfig& cfg) {
  if (cfg.model.provider == "http") {
    gateway::HttpProviderOptions opts;
    opts.endpoint = cfg.model.endpoint;
    opts.model = cfg.model.model;
    if (const char* key = std::getenv(cfg.model.api_key_env.c_str())) opts.api_key = key;
    return std::make_shared<gateway::HttpProvider>(std::move(opts));
  }
  return std::make_shared<gateway::ScriptedMockProvider>(cfg.model.mock_dir);
}

std::shared_ptr<eval::EmbeddingProvider> make_embedding_provider(const RunConfig& cfg) {
  if (cfg.eval.provider == "http") {
    return std::make_shared<eval::HttpEmbeddingProvider>(cfg.eval.endpoint, cfg.eval.max_batch);
  }
  return std::make_shared<eval::HashedBagOfWordsEmbedder>(cfg.eval.stub_dim);
}

gateway::GatewayOptions gateway_options(const RunConfig& cfg, const std::string& participant) {
  gateway::GatewayOptions o;
  o.params = {cfg.model.temperature, cfg.model.top_p};
  o.retry.max_attempts = cfg.model.retries;
  o.retry.base_delay = std::chrono::milliseconds(cfg.model.retry_base_delay_ms);
  o.requests_per_minute = cfg.model.rpm;
  o.parallelism = cfg.model.parallelism;
  o.max_payload_bytes = cfg.model.max_payload_bytes;
  o.max_video_payload_bytes = cfg.model.max_video_payload_bytes;
  o.chunk_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(cfg.model.chunk_timeout_s * 1000));
  o.video_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(cfg.model.video_timeout_s * 1000));
  o.interval_s = cfg.ingest.interval_s;
  o.utc_offset_minutes = cfg.utc_offset_for(participant);
  o.prompts_dir = cfg.model.prompts_dir;
  return o;
}

fs::path screenshot_dir(const RunConfig& cfg, const std::string& participant, const std::string& date) {
  return cfg.screenshots_dir / participant / date;
}

fs::path journal_path(const RunConfig& cfg, const std::string& participant, const std::string& date,
                      StreamTag stream) {
  return cfg.out_dir / "journals" / participant / (date + "." + std::string(journal::to_string(stream)) + ".json");
}

fs::path ground_truth_path(const RunConfig& cfg, const std::string& participant, const std::string& date) {
  return cfg.ground_truth_dir / participant / (date + ".json");
}

fs::path video_path(const RunConfig& cfg, const std::string& participant, const std::string& date) {
  std::string p = substitute(cfg.video.path_pattern, "out_dir", cfg.out_dir.string());
  p = substitute(p, "participant", participant);
  return substitute(p, "date", date);
}

fs::path intermediate_dir(const RunConfig& cfg, const std::string& participant, const std::string& date) {
  return cfg.out_dir / "intermediate" / participant / date;
}

ingest::IngestOptions ingest_options(const RunConfig& cfg, const std::string& participant, const std::string& date) {
  ingest::IngestOptions o = cfg.ingest;
  if (cfg.restrict_to_day) {
    const auto d = parse_date(date);
    if (!d) throw Error(ErrorCode::ConfigError, "bad date " + date);
    o.window = day_window_ms(*d, cfg.utc_offset_for(participant));
  }
  return o;
}

namespace {

struct DayJob {
  std::string participant;
  std::string date;
  std::vector<StreamTag> streams;
};

ojson request_json(const gateway::ModelRequest& r) {
  ojson attachments = ojson::array();
  for (const auto& a : r.attachments) {
    attachments.push_back({{"path", a.path.filename().string()}, {"mime_type", a.mime_type}, {"bytes", a.size_bytes}});
  }
  return {{"tag", r.tag},
          {"kind", std::string(gateway::to_string(r.kind))},
          {"provider", r.provider},
          {"temperature", r.params.temperature},
          {"top_p", r.params.top_p},
          {"timeout_ms", r.timeout.count()},
          {"attachments", std::move(attachments)},
          {"prompt", r.prompt}};
}

void run_day(const RunConfig& cfg, const DayJob& job, const Dependencies& deps,
             const std::shared_ptr<gateway::RateLimiter>& limiter, std::vector<ManifestEntry>& out) {
  for (const auto stream : job.streams) {
    ManifestEntry e;
    e.participant = job.participant;
    e.date = job.date;
    e.stream = stream;
    out.push_back(std::move(e));
  }
  const fs::path inter = intermediate_dir(cfg, job.participant, job.date);

  std::optional<ingest::LoadResult> loaded;
  try {
    loaded = ingest::load_stream(screenshot_dir(cfg, job.participant, job.date),
                                 ingest_options(cfg, job.participant, job.date));
  } catch (const std::exception& ex) {
    for (auto& e : out) e.error = std::string("ingest: ") + ex.what();
  }
  if (!loaded) return;
  for (auto& e : out) e.ingest = loaded->stats;

  std::mutex requests_mutex;
  std::vector<gateway::ModelRequest> requests;
  gateway::Gateway gw(deps.model_provider, gateway_options(cfg, job.participant), {}, limiter);
  gw.set_request_observer([&](const gateway::ModelRequest& r) {
    std::lock_guard lock(requests_mutex);
    requests.push_back(r);
  });
  const std::string scope = job.participant + "/" + job.date;
  const auto params = gw.options().params;

  for (auto& entry : out) {
    const fs::path target = journal_path(cfg, job.participant, job.date, entry.stream);
    try {
      std::string raw;
      if (entry.stream == StreamTag::Text) {
        const auto chunks = chunking::chunk_stream(loaded->stream, cfg.chunk);
        const auto descriptions = gw.describe_chunks(chunks, params, scope);
        for (const auto& d : descriptions) {
          char name[32];
          std::snprintf(name, sizeof name, "chunk_%04zu.txt", d.ordinal);
          write_text(inter / name, d.text);
        }
        raw = gw.summarize_text_journal(descriptions, params, scope);
        write_text(inter / "text_journal.raw.txt", raw);
      } else {
        video::VideoSpec spec;
        spec.fps = cfg.video.fps;
        spec.resolution = cfg.video.resolution;
        spec.timestamp_overlay = cfg.video.timestamp_overlay;
        spec.utc_offset_minutes = cfg.utc_offset_for(job.participant);
        spec.lossless = cfg.video.lossless;
        const auto artifact =
            video::assemble(loaded->stream, spec, video_path(cfg, job.participant, job.date), *deps.encoder);
        raw = gw.summarize_video_journal(artifact, params, scope);
        write_text(inter / "video_journal.raw.txt", raw);
      }
      auto j = journal::parse_journal(raw, entry.stream);
      j.participant = job.participant;
      j.date = job.date;
      journal::write_journal(j, target);
      entry.ok = true;
      entry.entries = j.size();
      entry.journal_path = target.lexically_relative(cfg.out_dir);
    } catch (const std::exception& ex) {
      entry.error = ex.what();
      std::error_code ec;
      fs::remove(target, ec);
    }
  }

  std::sort(requests.begin(), requests.end(),
            [](const auto& l, const auto& r) { return l.tag < r.tag; });
  std::string log;
  for (const auto& r : requests) log += request_json(r).dump(-1, ' ', false, ojson::error_handler_t::replace) + "\n";
  write_text(inter / "requests.jsonl", log);
}

}  // namespace

RunManifest cmd_generate(const RunConfig& cfg, const DayFilter& filter, Dependencies deps) {
  std::error_code ec;
  if (!fs::is_directory(cfg.screenshots_dir, ec)) {
    throw Error(ErrorCode::ConfigError, "screenshots directory does not exist: " + cfg.screenshots_dir.string());
  }
  if (!deps.model_provider) deps.model_provider = make_model_provider(cfg);
  if (!deps.encoder) {
    deps.encoder = video::SubprocessEncoder::for_program(
        cfg.video.encoder_path.empty() ? video::default_encoder_program() : cfg.video.encoder_path);
  }
  auto limiter = std::make_shared<gateway::RateLimiter>(cfg.model.rpm);

  std::vector<DayJob> jobs;
  for (const auto& p : cfg.participants) {
    if (!selected(filter.participant, p)) continue;
    for (const auto& d : cfg.dates) {
      if (!selected(filter.date, d)) continue;
      DayJob job{p, d, {}};
      for (const auto s : cfg.streams) {
        if (selected(filter.stream, s)) job.streams.push_back(s);
      }
      if (!job.streams.empty()) jobs.push_back(std::move(job));
    }
  }

  std::vector<std::vector<ManifestEntry>> results(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) { run_day(cfg, jobs[i], deps, limiter, results[i]); });

  RunManifest manifest;
  for (auto& r : results) {
    for (auto& e : r) manifest.entries.push_back(std::move(e));
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(), [](const ManifestEntry& l, const ManifestEntry& r) {
    return std::make_tuple(l.participant, l.date, stream_rank(l.stream)) <
           std::make_tuple(r.participant, r.date, stream_rank(r.stream));
  });
  write_text(cfg.out_dir / "manifest.json", manifest.to_json());
  return manifest;
}

EvaluateResult cmd_evaluate(const RunConfig& cfg, Dependencies deps) {
  std::error_code ec;
  if (!fs::is_directory(cfg.ground_truth_dir, ec)) {
    throw Error(ErrorCode::ConfigError, "ground-truth directory does not exist: " + cfg.ground_truth_dir.string());
  }
  if (!deps.embedding_provider) deps.embedding_provider = make_embedding_provider(cfg);
  eval::Embedder embedder(deps.embedding_provider);

  EvaluateResult result;
  for (const auto& p : cfg.participants) {
    for (const auto& d : cfg.dates) {
      const fs::path gt_path = ground_truth_path(cfg, p, d);
      if (!fs::is_regular_file(gt_path, ec)) {
        result.errors.push_back(std::string(to_string(ErrorCode::MissingGroundTruth)) + "(" + p + ", " + d + ")");
        continue;
      }
      journal::Journal truth;
      try {
        truth = journal::load_ground_truth(gt_path);
      } catch (const std::exception& ex) {
        result.errors.push_back(ex.what());
        continue;
      }
      for (const auto stream : cfg.streams) {
        const fs::path pred_path = journal_path(cfg, p, d, stream);
        if (!fs::is_regular_file(pred_path, ec)) {
          result.errors.push_back(std::string(to_string(ErrorCode::MissingPrediction)) + "(" + p + ", " + d + ", " +
                                  std::string(journal::to_string(stream)) + ")");
          continue;
        }
        try {
          auto pred = journal::load_journal(pred_path, stream);
          pred.participant = p;
          truth.participant = p;
          truth.date = pred.date = d;
          result.report.rows.push_back({p, d, stream, eval::evaluate_pair(truth, pred, embedder)});
        } catch (const std::exception& ex) {
          result.errors.push_back(ex.what());
        }
      }
    }
  }
  result.report.sort();
  write_text(cfg.out_dir / "report.csv", to_csv(result.report));
  if (!result.report.rows.empty()) write_text(cfg.out_dir / "report.txt", render_report(result.report));
  return result;
}

std::string cmd_report(const fs::path& report_csv) { return render_report(read_report_csv(report_csv)); }

std::vector<InspectRow> cmd_inspect(const RunConfig& cfg, const DayFilter& filter) {
  std::vector<InspectRow> rows;
  for (const auto& p : cfg.participants) {
    if (!selected(filter.participant, p)) continue;
    for (const auto& d : cfg.dates) {
      if (!selected(filter.date, d)) continue;
      InspectRow row{p, d, std::nullopt, {}};
      try {
        row.stats = ingest::load_stream(screenshot_dir(cfg, p, d), ingest_options(cfg, p, d)).stats;
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace autojournal::pipeline
