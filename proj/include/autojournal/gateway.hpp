#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "autojournal/chunker.hpp"
#include "autojournal/error.hpp"
#include "autojournal/prompts.hpp"
#include "autojournal/video.hpp"

namespace autojournal::gateway {

struct DecodingParams {
  double temperature = 0.0;
  double top_p = 1.0;
};

enum class AttachmentKind { Image, Video };

struct Attachment {
  AttachmentKind kind = AttachmentKind::Image;
  std::filesystem::path path;
  std::string mime_type;
  std::size_t size_bytes = 0;
};

enum class RequestKind { ChunkDescribe, TextJournal, VideoJournal };
std::string_view to_string(RequestKind kind);

struct ModelRequest {
  RequestKind kind = RequestKind::ChunkDescribe;
  // Stable identity of the call, e.g. "alice/2024-05-01/chunk_0003". The
  // scripted provider keys its canned responses on it.
  std::string tag;
  std::string prompt;
  std::vector<Attachment> attachments;
  DecodingParams params;
  std::string provider;
  std::chrono::milliseconds timeout{120'000};

  std::size_t payload_bytes() const;
  // Attachments are all images or exactly one video.
  bool attachments_well_formed() const;
};

struct ModelResponse {
  std::string text;
  std::int64_t latency_ms = 0;
  std::map<std::string, std::string> provider_meta;
};

// ProviderError with the HTTP-ish status and whether a retry may help.
class ProviderFailure : public Error {
 public:
  ProviderFailure(int status, const std::string& message, bool transient)
      : Error(ErrorCode::ProviderError, std::to_string(status) + " " + message),
        status_(status),
        transient_(transient) {}
  int status() const noexcept { return status_; }
  bool transient() const noexcept { return transient_; }

 private:
  int status_;
  bool transient_;
};

class ModelProvider {
 public:
  virtual ~ModelProvider() = default;
  virtual std::string id() const = 0;
  // Throws ProviderFailure, Error(Timeout) or Error(UploadFailed).
  virtual ModelResponse send(const ModelRequest& request) = 0;
};

// Offline provider that answers from canned text. Lookup order for a
// request: in-memory script by tag, <dir>/<tag>.txt, <dir>/<kind>.txt.
class ScriptedMockProvider : public ModelProvider {
 public:
  explicit ScriptedMockProvider(std::optional<std::filesystem::path> fixture_dir = std::nullopt);

  std::string id() const override { return "mock"; }
  ModelResponse send(const ModelRequest& request) override;

  void script(const std::string& tag, std::string response);
  // The next `count` calls for `tag` fail with the given status
  // (status 0 simulates a timeout).
  void fail_next(const std::string& tag, int count, int status);

  std::vector<ModelRequest> captured() const;
  void clear_captured();

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> scripted_;
  std::map<std::string, std::pair<int, int>> failures_;
  std::vector<ModelRequest> captured_;
};

struct HttpProviderOptions {
  std::string endpoint;  // e.g. http://localhost:8000/v1/chat/completions
  std::string model = "default";
  std::string api_key;   // sent as "Authorization: Bearer ..." when non-empty
};

// OpenAI-style chat completions over HTTP(S). Images and the video travel
// inline as base64 data URLs.
class HttpProvider : public ModelProvider {
 public:
  explicit HttpProvider(HttpProviderOptions options);
  std::string id() const override { return "http"; }
  ModelResponse send(const ModelRequest& request) override;

  // Request body, exposed for tests.
  std::string build_body(const ModelRequest& request) const;

 private:
  HttpProviderOptions options_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{30'000};

  std::chrono::milliseconds delay_before(int attempt) const;  // attempt is 2-based
};

// Thread-safe token bucket; requests_per_minute <= 0 disables limiting.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  using Sleep = std::function<void(std::chrono::nanoseconds)>;

  explicit RateLimiter(double requests_per_minute, double burst = 0, Clock clock = {}, Sleep sleep = {});

  void acquire();
  double requests_per_minute() const { return rpm_; }

 private:
  double rpm_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  Clock clock_;
  Sleep sleep_;
  std::mutex mutex_;
};

struct GatewayOptions {
  DecodingParams params;
  RetryPolicy retry;
  double requests_per_minute = 60;
  std::size_t parallelism = 4;
  std::size_t max_payload_bytes = 20'000'000;
  // Separate budget for the single-video journal request.
  std::size_t max_video_payload_bytes = 2'000'000'000;
  std::chrono::milliseconds chunk_timeout{120'000};
  std::chrono::milliseconds video_timeout{600'000};
  double interval_s = 3.0;
  int utc_offset_minutes = 0;
  // Overrides the compiled-in templates when set.
  std::optional<std::filesystem::path> prompts_dir;
};

struct ChunkDescription {
  std::size_t ordinal = 0;
  ingest::EpochMs start_time = 0;
  ingest::EpochMs end_time = 0;
  std::string text;
};

// Joins descriptions chronologically, each under a "[start – end]" header.
std::string format_descriptions(const std::vector<ChunkDescription>& descriptions,
                                int utc_offset_minutes);

class Gateway {
 public:
  using Sleep = std::function<void(std::chrono::milliseconds)>;

  // Gateways that share `limiter` share one request budget; when null a
  // limiter is built from options.requests_per_minute.
  Gateway(std::shared_ptr<ModelProvider> provider, GatewayOptions options, Sleep sleep = {},
          std::shared_ptr<RateLimiter> limiter = nullptr);

  const GatewayOptions& options() const { return options_; }
  const PromptTemplate& prompt(PromptId id) const;

  ChunkDescription describe_chunk(const chunking::Chunk& chunk, const DecodingParams& params,
                                  const std::string& scope = {});
  // Up to options.parallelism calls in flight; results in chunk order.
  std::vector<ChunkDescription> describe_chunks(const std::vector<chunking::Chunk>& chunks,
                                                const DecodingParams& params,
                                                const std::string& scope = {});
  std::string summarize_text_journal(const std::vector<ChunkDescription>& descriptions,
                                     const DecodingParams& params, const std::string& scope = {});
  std::string summarize_video_journal(const video::VideoArtifact& video, const DecodingParams& params,
                                      const std::string& scope = {});

  // Observer called with every outbound request (before retries).
  void set_request_observer(std::function<void(const ModelRequest&)> observer);

  ModelResponse send(const ModelRequest& request);

 private:
  std::shared_ptr<ModelProvider> provider_;
  GatewayOptions options_;
  Sleep sleep_;
  std::shared_ptr<RateLimiter> limiter_;
  std::map<PromptId, PromptTemplate> templates_;
  std::function<void(const ModelRequest&)> observer_;
  std::mutex observer_mutex_;
};

std::string make_tag(const std::string& scope, const std::string& leaf);

}  // namespace autojournal::gateway
