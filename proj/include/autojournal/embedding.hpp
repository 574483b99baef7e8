#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace autojournal::eval {

// Unit-norm sentence representation.
struct EmbeddingVector {
  std::vector<double> values;
  std::size_t dim() const { return values.size(); }
};

// Raw embeddings straight from a backend; need not be normalized.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) = 0;
};

// Deterministic hashed bag-of-words: lowercase, split on characters that are
// not ASCII alphanumerics (bytes >= 0x80 count as word characters, so UTF-8
// words survive), FNV-1a-64 each token into `dim` buckets and count.
// A text without tokens is hashed whole as a single token.
class HashedBagOfWordsEmbedder : public EmbeddingProvider {
 public:
  explicit HashedBagOfWordsEmbedder(std::size_t dim = 256);

  std::string id() const override { return "stub-bow-" + std::to_string(dim_); }
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override;

  std::size_t dim() const { return dim_; }
  static std::vector<std::string> tokenize(const std::string& text);
  std::size_t bucket(const std::string& token) const;

 private:
  std::size_t dim_;
};

struct EmbedServiceHealth {
  std::string status;
  std::string model_id;
  std::size_t dim = 0;
};

// Client for the embedding microservice:
//   POST <base>/embed  {"texts": [...]} -> {"vectors": [[...]], "model_id": "...", "dim": D}
//   GET  <base>/health -> {"status": "...", "model_id": "...", "dim": D}
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(std::string base_url, std::size_t max_batch = 128,
                                 std::chrono::seconds timeout = std::chrono::seconds(60));

  std::string id() const override { return "http:" + base_url_; }
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override;
  EmbedServiceHealth health() const;

 private:
  std::string base_url_;
  std::size_t max_batch_;
  std::chrono::seconds timeout_;
};

// Normalizing, caching front for a provider. The cache is keyed by exact
// text and is safe under concurrent use. Every vector handed out has the
// session dimension fixed by the first batch.
class Embedder {
 public:
  explicit Embedder(std::shared_ptr<EmbeddingProvider> provider);

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);
  EmbeddingVector embed_one(const std::string& text);

  std::size_t cache_size() const;
  std::size_t provider_calls() const;
  const EmbeddingProvider& provider() const { return *provider_; }

 private:
  std::shared_ptr<EmbeddingProvider> provider_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const EmbeddingVector>> cache_;
  std::size_t dim_ = 0;
  std::size_t calls_ = 0;
};

// Scales to unit Euclidean norm; throws Error(ProviderError) on a zero vector.
EmbeddingVector normalize(std::span<const double> raw);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace autojournal::eval
