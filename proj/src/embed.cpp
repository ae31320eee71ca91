#include "zest/embed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zest/errors.hpp"
#include "zest/plan.hpp"

namespace zest {

std::string_view to_string(EmbedderKind kind) {
  switch (kind) {
    case EmbedderKind::lexical:
      return "lexical";
    case EmbedderKind::remote:
      return "remote";
  }
  return "unknown";
}

EmbedderKind embedder_kind_from_string(std::string_view name) {
  if (name == "lexical") return EmbedderKind::lexical;
  if (name == "remote") return EmbedderKind::remote;
  throw std::invalid_argument("unknown embedder kind '" + std::string(name) + "'");
}

EmbedderSpec EmbedderSpec::lexical(std::size_t dimension, int ngram_lo, int ngram_hi) {
  EmbedderSpec spec;
  spec.dimension = dimension;
  spec.ngram_lo = ngram_lo;
  spec.ngram_hi = ngram_hi;
  spec.validate();
  return spec;
}

EmbedderSpec EmbedderSpec::remote(std::string endpoint, std::string model_id, std::size_t dimension) {
  EmbedderSpec spec;
  spec.kind = EmbedderKind::remote;
  spec.endpoint = std::move(endpoint);
  spec.model_id = std::move(model_id);
  spec.dimension = dimension;
  spec.validate();
  return spec;
}

void EmbedderSpec::validate() const {
  if (dimension < 64) throw std::invalid_argument("embedding dimension must be at least 64");
  if (kind == EmbedderKind::lexical && !(1 <= ngram_lo && ngram_lo <= ngram_hi && ngram_hi <= 5)) {
    throw std::invalid_argument("n-gram range must satisfy 1 <= lo <= hi <= 5");
  }
  if (kind == EmbedderKind::remote && endpoint.empty()) {
    throw std::invalid_argument("remote embedder requires an endpoint");
  }
  if (model_id.empty()) throw std::invalid_argument("embedder model_id must not be empty");
}

bool EmbedderSpec::operator==(const EmbedderSpec& other) const {
  return kind == other.kind && dimension == other.dimension && ngram_lo == other.ngram_lo &&
         ngram_hi == other.ngram_hi && endpoint == other.endpoint && model_id == other.model_id;
}

bool compatible(const EmbedderSpec& a, const EmbedderSpec& b) {
  if (a.kind != b.kind || a.model_id != b.model_id || a.dimension != b.dimension) return false;
  if (a.kind == EmbedderKind::lexical) return a.ngram_lo == b.ngram_lo && a.ngram_hi == b.ngram_hi;
  return true;
}

double EmbeddingVector::norm() const noexcept {
  double sum = 0.0;
  for (float v : values) sum += static_cast<double>(v) * v;
  return std::sqrt(sum);
}

std::uint64_t feature_hash(std::string_view bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

void l2_normalize(std::vector<float>& values) {
  double sum = 0.0;
  for (float v : values) sum += static_cast<double>(v) * v;
  if (sum <= 0.0) return;
  const double inv = 1.0 / std::sqrt(sum);
  for (float& v : values) v = static_cast<float>(v * inv);
}

LexicalEmbedder::LexicalEmbedder(EmbedderSpec spec) : spec_(std::move(spec)) {
  if (spec_.kind != EmbedderKind::lexical) throw std::invalid_argument("LexicalEmbedder needs a lexical spec");
  spec_.validate();
}

EmbeddingVector LexicalEmbedder::embed(std::string_view text) const {
  const auto tokens = tokenize(text);
  std::vector<double> counts(spec_.dimension, 0.0);
  std::string gram;
  for (int n = spec_.ngram_lo; n <= spec_.ngram_hi; ++n) {
    const auto width = static_cast<std::size_t>(n);
    if (tokens.size() < width) break;
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
      gram.clear();
      for (std::size_t j = 0; j < width; ++j) {
        if (j > 0) gram.push_back('\x1f');
        gram += tokens[i + j];
      }
      counts[feature_hash(gram) % spec_.dimension] += 1.0;
    }
  }

  double sum = 0.0;
  for (double c : counts) sum += c * c;
  EmbeddingVector out;
  out.model_id = spec_.model_id;
  out.values.resize(spec_.dimension, 0.0F);
  if (sum > 0.0) {
    const double inv = 1.0 / std::sqrt(sum);
    for (std::size_t i = 0; i < counts.size(); ++i) out.values[i] = static_cast<float>(counts[i] * inv);
  }
  return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec) {
  switch (spec.kind) {
    case EmbedderKind::lexical:
      return std::make_unique<LexicalEmbedder>(spec);
    case EmbedderKind::remote:
      return std::make_unique<RemoteEmbedder>(spec);
  }
  throw std::invalid_argument("unknown embedder kind");
}

EmbeddingVector embed(const EmbedderSpec& spec, std::string_view text) { return make_embedder(spec)->embed(text); }

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na < 1e-12 || nb < 1e-12) throw ZeroVector();
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) { return cosine(a.values, b.values); }

}  // namespace zest
