#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zest/embed.hpp"
#include "zest/plan.hpp"
#include "zest/records.hpp"
#include "zest/space.hpp"

namespace zest {

struct IndexKey {
  std::string query_id;
  std::int64_t input_gb = 0;

  auto operator<=>(const IndexKey&) const = default;
  bool operator==(const IndexKey&) const = default;
};

/// The distilled optimum of one (query, input size) pair.
struct IndexEntry {
  IndexKey key;
  EmbeddingVector embedding;  // unit norm
  Configuration best_config;
  double best_runtime_s = 0.0;
  std::string catalog;
  /// Canonical plan text the embedding was computed from.
  std::string plan;

  bool operator==(const IndexEntry&) const = default;
};

/// Immutable after construction; safe to query from any number of threads.
class RetrievalIndex {
 public:
  /// Sorts entries by key. Throws std::invalid_argument on duplicate keys,
  /// mixed dimensions or a dimension differing from the embedder's.
  RetrievalIndex(EmbedderSpec embedder, CanonicalizeOptions canonicalize, std::string space_profile,
                 std::vector<IndexEntry> entries);

  const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
  const EmbedderSpec& embedder_spec() const noexcept { return embedder_; }
  const CanonicalizeOptions& canonicalize_options() const noexcept { return canonicalize_; }
  const std::string& space_profile() const noexcept { return space_profile_; }
  std::size_t dimension() const noexcept { return embedder_.dimension; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const IndexEntry* find(const IndexKey& key) const;

  /// Entries whose predicate holds, e.g. to drop a catalog or an input size.
  RetrievalIndex filtered(const std::function<bool(const IndexEntry&)>& keep) const;

  /// Merges entries in; for a key present on both sides the lower runtime wins.
  RetrievalIndex with_appended(std::vector<IndexEntry> more) const;

  bool operator==(const RetrievalIndex&) const = default;

 private:
  EmbedderSpec embedder_;
  CanonicalizeOptions canonicalize_;
  std::string space_profile_;
  std::vector<IndexEntry> entries_;
};

struct Neighbor {
  const IndexEntry* entry;
  double similarity;
};

/// Exact top-k by cosine similarity, descending; ties go to the smaller
/// (query_id, input_gb). Returns min(k, size) neighbors.
/// Throws EmptyIndex, DimensionMismatch, ZeroVector, std::invalid_argument for k == 0.
std::vector<Neighbor> query(const RetrievalIndex& index, std::span<const float> probe, std::size_t k);

struct IndexBuildOptions {
  CanonicalizeOptions canonicalize;
  std::string space_profile = "emr";
};

/// One entry per (query_id, input_gb) carrying the group's minimum-runtime
/// configuration. Runtime ties go to the lexicographically smallest
/// configuration tuple. Throws InconsistentGroup when a group's plans do not
/// share one canonical form.
RetrievalIndex build_index(std::span<const ExecutionRecord> records, const Embedder& embedder,
                           const IndexBuildOptions& options = {});

/// Keeps, per key, the single best record under the same rule build_index uses.
std::vector<ExecutionRecord> best_records(std::span<const ExecutionRecord> records);

struct QuerySplit {
  std::vector<ExecutionRecord> train;
  std::vector<ExecutionRecord> test;
  std::vector<std::string> test_query_ids;  // sorted
};

/// Partitions whole query ids: round(test_fraction * #ids) of them (at least
/// one, and at most #ids - 1 when there are two or more) go to test.
/// Deterministic given the seed. Throws std::invalid_argument unless
/// 0 < test_fraction < 1.
QuerySplit split_by_query(std::span<const ExecutionRecord> records, double test_fraction, std::uint64_t seed);

/// Versioned JSON container; vectors are base64 little-endian float32.
std::string serialize_index(const RetrievalIndex& index);
/// Throws FormatVersionError for an unknown or missing version tag and
/// IoError for unreadable or malformed content.
RetrievalIndex deserialize_index(std::string_view text);

void save_index(const RetrievalIndex& index, const std::filesystem::path& path);
RetrievalIndex load_index(const std::filesystem::path& path);

inline constexpr int kIndexFormatVersion = 1;

}  // namespace zest
