#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace zest {

enum class EmbedderKind { lexical, remote };

std::string_view to_string(EmbedderKind kind);
EmbedderKind embedder_kind_from_string(std::string_view name);

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::lexical;
  std::size_t dimension = 4096;
  int ngram_lo = 1;
  int ngram_hi = 3;
  std::string endpoint;
  std::string model_id = "lexical-hash-ngram";

  // Remote transport settings. Not part of an embedder's identity.
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::chrono::milliseconds retry_backoff{200};

  static EmbedderSpec lexical(std::size_t dimension = 4096, int ngram_lo = 1, int ngram_hi = 3);
  static EmbedderSpec remote(std::string endpoint, std::string model_id, std::size_t dimension);

  /// Throws std::invalid_argument unless 1 <= ngram_lo <= ngram_hi <= 5,
  /// dimension >= 64 and (for remote) the endpoint is set.
  void validate() const;

  bool operator==(const EmbedderSpec& other) const;
};

/// Two specs produce comparable vectors: same kind, model and dimension, and
/// for the lexical kind the same n-gram window.
bool compatible(const EmbedderSpec& a, const EmbedderSpec& b);

struct EmbeddingVector {
  std::vector<float> values;
  std::string model_id;

  std::size_t dimension() const noexcept { return values.size(); }
  double norm() const noexcept;

  bool operator==(const EmbeddingVector&) const = default;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual const EmbedderSpec& spec() const noexcept = 0;
};

/// Seed folded into the FNV-1a offset basis for feature hashing. Changing it
/// invalidates every stored lexical index.
inline constexpr std::uint64_t kLexicalHashSeed = 0x9e3779b97f4a7c15ULL;

/// FNV-1a over `bytes`, starting from the standard offset basis xor `seed`,
/// finished with the splitmix64 avalanche.
std::uint64_t feature_hash(std::string_view bytes, std::uint64_t seed = kLexicalHashSeed) noexcept;

/// Hashed token n-grams with term-frequency weights, L2-normalized.
///
/// Text is tokenized with zest::tokenize; every window of n consecutive
/// tokens for n in [ngram_lo, ngram_hi] is joined with '\x1f' and hashed into
/// one of `dimension` buckets. An empty text yields the zero vector.
class LexicalEmbedder final : public Embedder {
 public:
  explicit LexicalEmbedder(EmbedderSpec spec);

  EmbeddingVector embed(std::string_view text) const override;
  const EmbedderSpec& spec() const noexcept override { return spec_; }

 private:
  EmbedderSpec spec_;
};

/// Client for an HTTP embedding service.
///
/// Sends POST {"model": model_id, "input": [text]} and expects
/// {"embeddings": [[...]]}. Vectors are L2-normalized on arrival. When the
/// ZEST_EMBEDDING_API_KEY environment variable is set its value is sent as a
/// bearer token. Responses are kept in a bounded cache keyed by model and
/// text hash.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedderSpec spec, std::size_t cache_capacity = 1024);

  EmbeddingVector embed(std::string_view text) const override;
  const EmbedderSpec& spec() const noexcept override { return spec_; }

  std::size_t cache_size() const;

 private:
  std::vector<float> fetch(std::string_view text) const;

  EmbedderSpec spec_;
  std::size_t cache_capacity_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::uint64_t, std::vector<float>> cache_;
  mutable std::deque<std::uint64_t> cache_order_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec);

/// One-shot convenience; builds a fresh embedder per call.
EmbeddingVector embed(const EmbedderSpec& spec, std::string_view text);

/// Cosine similarity computed in double precision.
/// Throws DimensionMismatch or ZeroVector (norm below 1e-12).
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Scales `values` to unit L2 norm in place; leaves an all-zero vector alone.
void l2_normalize(std::vector<float>& values);

}  // namespace zest
