#include "autojournal/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "autojournal/error.hpp"
#include "autojournal/simd.hpp"

namespace autojournal::eval {

using json = nlohmann::json;

EmbeddingVector normalize(std::span<const double> raw) {
  const double norm = std::sqrt(simd::squared_norm(raw));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::ProviderError, "embedding has zero or non-finite norm");
  }
  EmbeddingVector v;
  v.values.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) v.values[i] = raw[i] / norm;
  return v;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  return simd::dot(a.values, b.values);
}

// ---------------------------------------------------------------- stub

HashedBagOfWordsEmbedder::HashedBagOfWordsEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "stub embedding dimension must be positive");
}

std::vector<std::string> HashedBagOfWordsEmbedder::tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t HashedBagOfWordsEmbedder::bucket(const std::string& token) const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : token) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h % dim_);
}

std::vector<std::vector<double>> HashedBagOfWordsEmbedder::embed_raw(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    std::vector<double> v(dim_, 0.0);
    auto tokens = tokenize(text);
    if (tokens.empty()) tokens.push_back(text);
    for (const auto& t : tokens) v[bucket(t)] += 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------- http

namespace {

std::pair<std::string, std::string> split_base(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::ConfigError, "bad embedding endpoint: " + url);
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::size_t max_batch,
                                             std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), max_batch_(std::max<std::size_t>(1, max_batch)), timeout_(timeout) {
  split_base(base_url_);
}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed_raw(const std::vector<std::string>& texts) {
  const auto [origin, prefix] = split_base(base_url_);
  httplib::Client client(origin);
  client.set_read_timeout(timeout_.count(), 0);
  client.set_connection_timeout(10, 0);
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += max_batch_) {
    const std::size_t end = std::min(texts.size(), begin + max_batch_);
    const json body = {{"texts", std::vector<std::string>(texts.begin() + begin, texts.begin() + end)}};
    auto res = client.Post(prefix + "/embed", body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::ProviderError, base_url_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw Error(ErrorCode::ProviderError, base_url_ + ": HTTP " + std::to_string(res->status) + " " +
                                                res->body.substr(0, 256));
    }
    json reply;
    try {
      reply = json::parse(res->body);
      const auto& vectors = reply.at("vectors");
      if (vectors.size() != end - begin) {
        throw Error(ErrorCode::ProviderError, "embedding service returned " + std::to_string(vectors.size()) +
                                                  " vectors for " + std::to_string(end - begin) + " texts");
      }
      for (const auto& row : vectors) out.push_back(row.get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ProviderError, std::string("malformed embedding response: ") + e.what());
    }
  }
  return out;
}

EmbedServiceHealth HttpEmbeddingProvider::health() const {
  const auto [origin, prefix] = split_base(base_url_);
  httplib::Client client(origin);
  client.set_read_timeout(timeout_.count(), 0);
  auto res = client.Get(prefix + "/health");
  if (!res) throw Error(ErrorCode::ProviderError, base_url_ + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(ErrorCode::ProviderError, "health: HTTP " + std::to_string(res->status));
  try {
    const auto j = json::parse(res->body);
    return {j.value("status", ""), j.value("model_id", ""), j.value("dim", std::size_t{0})};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("malformed health response: ") + e.what());
  }
}

// ---------------------------------------------------------------- embedder

Embedder::Embedder(std::shared_ptr<EmbeddingProvider> provider) : provider_(std::move(provider)) {
  if (!provider_) throw Error(ErrorCode::ConfigError, "no embedding provider");
}

std::vector<EmbeddingVector> Embedder::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::InvalidArgument, "embed needs at least one text");
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mutex_);
    for (const auto& t : texts) {
      if (!cache_.contains(t) && std::find(missing.begin(), missing.end(), t) == missing.end()) {
        missing.push_back(t);
      }
    }
  }
  if (!missing.empty()) {
    const auto raw = provider_->embed_raw(missing);
    if (raw.size() != missing.size()) {
      throw Error(ErrorCode::ProviderError, "provider returned " + std::to_string(raw.size()) +
                                                " vectors for " + std::to_string(missing.size()) + " texts");
    }
    const std::size_t batch_dim = raw.front().size();
    for (const auto& row : raw) {
      if (row.size() != batch_dim) throw Error(ErrorCode::DimensionMismatch, "ragged embedding batch");
    }
    std::vector<std::shared_ptr<const EmbeddingVector>> normalized;
    normalized.reserve(raw.size());
    for (const auto& row : raw) normalized.push_back(std::make_shared<const EmbeddingVector>(normalize(row)));

    std::lock_guard lock(mutex_);
    ++calls_;
    if (dim_ == 0) dim_ = batch_dim;
    if (batch_dim != dim_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "batch dimension " + std::to_string(batch_dim) + " != session " + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], normalized[i]);
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::lock_guard lock(mutex_);
  for (const auto& t : texts) out.push_back(*cache_.at(t));
  return out;
}

EmbeddingVector Embedder::embed_one(const std::string& text) { return embed({text}).front(); }

std::size_t Embedder::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::size_t Embedder::provider_calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

}  // namespace autojournal::eval
