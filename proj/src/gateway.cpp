#include "autojournal/gateway.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "autojournal/image.hpp"
#include "autojournal/parallel.hpp"
#include "autojournal/timefmt.hpp"

namespace autojournal::gateway {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(RequestKind kind) {
  switch (kind) {
    case RequestKind::ChunkDescribe: return "chunk_describe";
    case RequestKind::TextJournal: return "text_journal";
    case RequestKind::VideoJournal: return "video_journal";
  }
  return "unknown";
}

std::size_t ModelRequest::payload_bytes() const {
  std::size_t total = 0;
  for (const auto& a : attachments) total += a.size_bytes;
  return total;
}

bool ModelRequest::attachments_well_formed() const {
  const auto videos = std::count_if(attachments.begin(), attachments.end(),
                                    [](const Attachment& a) { return a.kind == AttachmentKind::Video; });
  return videos == 0 || (videos == 1 && attachments.size() == 1);
}

std::string make_tag(const std::string& scope, const std::string& leaf) {
  return scope.empty() ? leaf : scope + "/" + leaf;
}

// ---------------------------------------------------------------- mock

ScriptedMockProvider::ScriptedMockProvider(std::optional<fs::path> fixture_dir)
    : dir_(std::move(fixture_dir)) {}

void ScriptedMockProvider::script(const std::string& tag, std::string response) {
  std::lock_guard lock(mutex_);
  scripted_[tag] = std::move(response);
}

void ScriptedMockProvider::fail_next(const std::string& tag, int count, int status) {
  std::lock_guard lock(mutex_);
  failures_[tag] = {count, status};
}

std::vector<ModelRequest> ScriptedMockProvider::captured() const {
  std::lock_guard lock(mutex_);
  return captured_;
}

void ScriptedMockProvider::clear_captured() {
  std::lock_guard lock(mutex_);
  captured_.clear();
}

namespace {

std::optional<std::string> read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

ModelResponse ScriptedMockProvider::send(const ModelRequest& request) {
  std::optional<std::string> text;
  {
    std::lock_guard lock(mutex_);
    captured_.push_back(request);
    if (auto it = failures_.find(request.tag); it != failures_.end() && it->second.first > 0) {
      --it->second.first;
      const int status = it->second.second;
      if (status == 0) throw Error(ErrorCode::Timeout, "scripted timeout for " + request.tag);
      throw ProviderFailure(status, "scripted failure for " + request.tag,
                            status == 429 || status >= 500);
    }
    if (auto it = scripted_.find(request.tag); it != scripted_.end()) text = it->second;
  }
  for (const auto& a : request.attachments) {
    std::error_code ec;
    if (!fs::is_regular_file(a.path, ec)) {
      throw Error(ErrorCode::UploadFailed, "attachment missing: " + a.path.string());
    }
  }
  if (!text && dir_) text = read_text(*dir_ / (request.tag + ".txt"));
  if (!text && dir_) text = read_text(*dir_ / (std::string(to_string(request.kind)) + ".txt"));
  if (!text) throw ProviderFailure(404, "no scripted response for " + request.tag, false);
  return ModelResponse{*text, 0, {{"provider", "mock"}, {"tag", request.tag}}};
}

// ---------------------------------------------------------------- http

namespace {

std::string base64(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::ConfigError, "bad endpoint URL: " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::string extract_content(const json& body) {
  if (body.contains("text") && body["text"].is_string()) return body["text"].get<std::string>();
  const auto& content = body.at("choices").at(0).at("message").at("content");
  if (content.is_string()) return content.get<std::string>();
  std::string joined;
  for (const auto& part : content) {
    if (part.contains("text")) joined += part["text"].get<std::string>();
  }
  return joined;
}

}  // namespace

HttpProvider::HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {
  parse_url(options_.endpoint);
}

std::string HttpProvider::build_body(const ModelRequest& request) const {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  for (const auto& a : request.attachments) {
    std::vector<std::uint8_t> bytes;
    try {
      bytes = read_file_bytes(a.path);
    } catch (const Error&) {
      throw Error(ErrorCode::UploadFailed, a.path.string());
    }
    const std::string url = "data:" + a.mime_type + ";base64," + base64(bytes);
    if (a.kind == AttachmentKind::Video) {
      content.push_back({{"type", "video_url"}, {"video_url", {{"url", url}}}});
    } else {
      content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
  }
  json body = {{"model", options_.model},
               {"temperature", request.params.temperature},
               {"top_p", request.params.top_p},
               {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
  return body.dump();
}

ModelResponse HttpProvider::send(const ModelRequest& request) {
  const auto url = parse_url(options_.endpoint);
  const std::string body = build_body(request);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_connection_timeout(10, 0);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(url.path, headers, body, "application/json");
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::Timeout, options_.endpoint + ": " + httplib::to_string(err));
    }
    throw ProviderFailure(0, options_.endpoint + ": " + httplib::to_string(err), true);
  }
  if (res->status != 200) {
    throw ProviderFailure(res->status, res->body.substr(0, 512),
                          res->status == 429 || res->status == 408 || res->status >= 500);
  }
  std::string text;
  try {
    text = extract_content(json::parse(res->body));
  } catch (const json::exception& e) {
    throw ProviderFailure(res->status, std::string("unexpected response shape: ") + e.what(), false);
  }
  return ModelResponse{std::move(text), latency.count(), {{"provider", "http"}, {"endpoint", options_.endpoint}}};
}

// ---------------------------------------------------------------- retry + rate

std::chrono::milliseconds RetryPolicy::delay_before(int attempt) const {
  const int exponent = std::clamp(attempt - 2, 0, 30);
  const auto delay = base_delay * (std::int64_t{1} << exponent);
  return std::min(delay, max_delay);
}

RateLimiter::RateLimiter(double requests_per_minute, double burst, Clock clock, Sleep sleep)
    : rpm_(requests_per_minute),
      capacity_(burst > 0 ? burst : std::max(1.0, requests_per_minute)),
      tokens_(capacity_),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })),
      sleep_(sleep ? std::move(sleep) : Sleep([](std::chrono::nanoseconds d) { std::this_thread::sleep_for(d); })) {
  last_ = clock_();
}

void RateLimiter::acquire() {
  if (rpm_ <= 0) return;
  const double per_second = rpm_ / 60.0;
  for (;;) {
    std::chrono::nanoseconds wait{0};
    {
      std::lock_guard lock(mutex_);
      const auto now = clock_();
      const double elapsed = std::chrono::duration<double>(now - last_).count();
      tokens_ = std::min(capacity_, tokens_ + elapsed * per_second);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::nanoseconds(static_cast<std::int64_t>(std::ceil((1.0 - tokens_) / per_second * 1e9)));
    }
    sleep_(wait);
  }
}

// ---------------------------------------------------------------- gateway

std::string format_descriptions(const std::vector<ChunkDescription>& descriptions, int utc_offset_minutes) {
  std::vector<const ChunkDescription*> ordered;
  for (const auto& d : descriptions) ordered.push_back(&d);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* l, const auto* r) {
    return std::tie(l->start_time, l->ordinal) < std::tie(r->start_time, r->ordinal);
  });
  std::string out;
  for (const auto* d : ordered) {
    if (!out.empty()) out += "\n\n";
    out += "[" + format_clock(d->start_time, utc_offset_minutes) + " – " +
           format_clock(d->end_time, utc_offset_minutes) + "]\n";
    out += d->text;
  }
  return out;
}

Gateway::Gateway(std::shared_ptr<ModelProvider> provider, GatewayOptions options, Sleep sleep,
                 std::shared_ptr<RateLimiter> limiter)
    : provider_(std::move(provider)),
      options_(std::move(options)),
      sleep_(sleep ? std::move(sleep) : Sleep([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      limiter_(limiter ? std::move(limiter) : std::make_shared<RateLimiter>(options_.requests_per_minute)) {
  if (!provider_) throw Error(ErrorCode::ConfigError, "no model provider configured");
  for (PromptId id : {PromptId::ChunkDescribe, PromptId::TextJournal, PromptId::VideoJournal}) {
    templates_.emplace(id, options_.prompts_dir ? load_template(id, *options_.prompts_dir)
                                                : builtin_template(id));
  }
}

const PromptTemplate& Gateway::prompt(PromptId id) const { return templates_.at(id); }

void Gateway::set_request_observer(std::function<void(const ModelRequest&)> observer) {
  std::lock_guard lock(observer_mutex_);
  observer_ = std::move(observer);
}

ModelResponse Gateway::send(const ModelRequest& request) {
  if (!request.attachments_well_formed()) {
    throw Error(ErrorCode::InvalidArgument, "attachments must be images only or exactly one video");
  }
  const bool is_video = !request.attachments.empty() &&
                        request.attachments.front().kind == AttachmentKind::Video;
  const std::size_t limit = is_video ? options_.max_video_payload_bytes : options_.max_payload_bytes;
  if (request.payload_bytes() > limit) {
    throw Error(ErrorCode::PayloadTooLarge, request.tag + ": " + std::to_string(request.payload_bytes()) +
                                                " bytes > " + std::to_string(limit));
  }
  {
    std::lock_guard lock(observer_mutex_);
    if (observer_) observer_(request);
  }
  const int attempts = std::max(1, options_.retry.max_attempts);
  for (int attempt = 1;; ++attempt) {
    limiter_->acquire();
    try {
      const auto started = std::chrono::steady_clock::now();
      ModelResponse response = provider_->send(request);
      if (response.latency_ms == 0) {
        response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - started)
                                  .count();
      }
      if (response.text.empty()) throw ProviderFailure(502, "empty response for " + request.tag, false);
      return response;
    } catch (const ProviderFailure& e) {
      if (!e.transient() || attempt >= attempts) throw;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Timeout || attempt >= attempts) throw;
    }
    sleep_(options_.retry.delay_before(attempt + 1));
  }
}

namespace {

std::string mime_for(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".mp4") return "video/mp4";
  if (ext == ".mkv") return "video/x-matroska";
  return "image/png";
}

std::string format_interval(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", seconds);
  return buf;
}

}  // namespace

ChunkDescription Gateway::describe_chunk(const chunking::Chunk& chunk, const DecodingParams& params,
                                         const std::string& scope) {
  if (chunk.frames.empty()) throw Error(ErrorCode::InvalidArgument, "empty chunk");
  ModelRequest req;
  req.kind = RequestKind::ChunkDescribe;
  char leaf[32];
  std::snprintf(leaf, sizeof leaf, "chunk_%04zu", chunk.ordinal);
  req.tag = make_tag(scope, leaf);
  req.prompt = render_prompt(prompt(PromptId::ChunkDescribe),
                             {{"INTERVAL", format_interval(options_.interval_s)},
                              {"start_time", format_clock(chunk.start_time, options_.utc_offset_minutes)},
                              {"end_time", format_clock(chunk.end_time, options_.utc_offset_minutes)}});
  for (const auto& frame : chunk.frames) {
    req.attachments.push_back(
        {AttachmentKind::Image, frame.source_path(), mime_for(frame.source_path()), frame.encoded_bytes()});
  }
  req.params = params;
  req.provider = provider_->id();
  req.timeout = options_.chunk_timeout;
  auto response = send(req);
  return ChunkDescription{chunk.ordinal, chunk.start_time, chunk.end_time, std::move(response.text)};
}

std::vector<ChunkDescription> Gateway::describe_chunks(const std::vector<chunking::Chunk>& chunks,
                                                       const DecodingParams& params, const std::string& scope) {
  std::vector<ChunkDescription> out(chunks.size());
  parallel_for(chunks.size(), options_.parallelism,
               [&](std::size_t i) { out[i] = describe_chunk(chunks[i], params, scope); });
  return out;
}

std::string Gateway::summarize_text_journal(const std::vector<ChunkDescription>& descriptions,
                                            const DecodingParams& params, const std::string& scope) {
  if (descriptions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "summarize_text_journal needs at least one description");
  }
  ModelRequest req;
  req.kind = RequestKind::TextJournal;
  req.tag = make_tag(scope, "text_journal");
  req.prompt = render_prompt(prompt(PromptId::TextJournal), {}) + "\n" +
               format_descriptions(descriptions, options_.utc_offset_minutes);
  req.params = params;
  req.provider = provider_->id();
  req.timeout = options_.chunk_timeout;
  return send(req).text;
}

std::string Gateway::summarize_video_journal(const video::VideoArtifact& video, const DecodingParams& params,
                                             const std::string& scope) {
  std::error_code ec;
  const auto size = fs::file_size(video.path, ec);
  if (ec) throw Error(ErrorCode::UploadFailed, "video missing: " + video.path.string());
  ModelRequest req;
  req.kind = RequestKind::VideoJournal;
  req.tag = make_tag(scope, "video_journal");
  req.prompt = render_prompt(prompt(PromptId::VideoJournal), {});
  req.attachments.push_back({AttachmentKind::Video, video.path, mime_for(video.path), static_cast<std::size_t>(size)});
  req.params = params;
  req.provider = provider_->id();
  req.timeout = options_.video_timeout;
  return send(req).text;
}

}  // namespace autojournal::gateway
