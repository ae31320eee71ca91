#include "zest/index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "zest/errors.hpp"

namespace zest {

namespace {

/// Strict weak order on records competing for a key's optimum.
bool better_record(const ExecutionRecord& a, const ExecutionRecord& b) {
  if (a.runtime_s != b.runtime_s) return a.runtime_s < b.runtime_s;
  return a.config.as_tuple() < b.config.as_tuple();
}

std::map<IndexKey, std::vector<const ExecutionRecord*>> group_by_key(std::span<const ExecutionRecord> records) {
  std::map<IndexKey, std::vector<const ExecutionRecord*>> groups;
  for (const auto& r : records) groups[IndexKey{r.query_id, r.input_gb}].push_back(&r);
  return groups;
}

std::string key_label(const IndexKey& key) { return key.query_id + "@" + std::to_string(key.input_gb) + "GB"; }

}  // namespace

RetrievalIndex::RetrievalIndex(EmbedderSpec embedder, CanonicalizeOptions canonicalize, std::string space_profile,
                               std::vector<IndexEntry> entries)
    : embedder_(std::move(embedder)),
      canonicalize_(canonicalize),
      space_profile_(std::move(space_profile)),
      entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const IndexEntry& a, const IndexEntry& b) { return a.key < b.key; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i - 1].key == entries_[i].key) {
      throw std::invalid_argument("duplicate index key " + key_label(entries_[i].key));
    }
    if (entries_[i].embedding.dimension() != embedder_.dimension) {
      throw std::invalid_argument("entry " + key_label(entries_[i].key) + " has dimension " +
                                  std::to_string(entries_[i].embedding.dimension()) + ", index expects " +
                                  std::to_string(embedder_.dimension));
    }
  }
}

const IndexEntry* RetrievalIndex::find(const IndexKey& key) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const IndexEntry& e, const IndexKey& k) { return e.key < k; });
  if (it == entries_.end() || it->key != key) return nullptr;
  return &*it;
}

RetrievalIndex RetrievalIndex::filtered(const std::function<bool(const IndexEntry&)>& keep) const {
  std::vector<IndexEntry> kept;
  std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(kept), keep);
  return RetrievalIndex(embedder_, canonicalize_, space_profile_, std::move(kept));
}

RetrievalIndex RetrievalIndex::with_appended(std::vector<IndexEntry> more) const {
  std::map<IndexKey, IndexEntry> merged;
  for (const auto& e : entries_) merged.emplace(e.key, e);
  for (auto& e : more) {
    auto it = merged.find(e.key);
    if (it == merged.end()) {
      merged.emplace(e.key, std::move(e));
    } else if (e.best_runtime_s < it->second.best_runtime_s) {
      it->second = std::move(e);
    }
  }
  std::vector<IndexEntry> out;
  out.reserve(merged.size());
  for (auto& [key, entry] : merged) out.push_back(std::move(entry));
  return RetrievalIndex(embedder_, canonicalize_, space_profile_, std::move(out));
}

std::vector<Neighbor> query(const RetrievalIndex& index, std::span<const float> probe, std::size_t k) {
  if (index.empty()) throw EmptyIndex();
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (probe.size() != index.dimension()) throw DimensionMismatch(index.dimension(), probe.size());

  const auto& entries = index.entries();
  std::vector<Neighbor> scored;
  scored.reserve(entries.size());
  for (const auto& e : entries) scored.push_back({&e, cosine(probe, e.embedding.values)});

  const std::size_t n = std::min(k, scored.size());
  // Entries are sorted by key, so pointer order is key order.
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return a.entry < b.entry;
                    });
  scored.resize(n);
  return scored;
}

std::vector<ExecutionRecord> best_records(std::span<const ExecutionRecord> records) {
  std::vector<ExecutionRecord> out;
  for (const auto& [key, group] : group_by_key(records)) {
    const auto* best = *std::min_element(group.begin(), group.end(),
                                         [](const ExecutionRecord* a, const ExecutionRecord* b) {
                                           return better_record(*a, *b);
                                         });
    out.push_back(*best);
  }
  return out;
}

RetrievalIndex build_index(std::span<const ExecutionRecord> records, const Embedder& embedder,
                           const IndexBuildOptions& options) {
  std::unordered_map<std::string, std::string> canonical_cache;
  auto canonical_of = [&](const std::string& text) -> const std::string& {
    auto it = canonical_cache.find(text);
    if (it == canonical_cache.end()) {
      it = canonical_cache.emplace(text, canonicalize(parse_plan(text), options.canonicalize)).first;
    }
    return it->second;
  };

  std::vector<IndexEntry> entries;
  for (const auto& [key, group] : group_by_key(records)) {
    const ExecutionRecord* best = nullptr;
    const std::string* plan = nullptr;
    for (const auto* r : group) {
      validate(*r, key_label(key));
      const auto& canonical = canonical_of(r->logical_plan);
      if (plan == nullptr) {
        plan = &canonical;
      } else if (*plan != canonical) {
        throw InconsistentGroup("records for " + key_label(key) + " carry different logical plans");
      }
      if (best == nullptr || better_record(*r, *best)) best = r;
    }
    IndexEntry entry;
    entry.key = key;
    entry.embedding = embedder.embed(*plan);
    if (entry.embedding.norm() < 1e-12) {
      throw EmbeddingError("plan for " + key_label(key) + " embedded to the zero vector");
    }
    entry.best_config = best->config;
    entry.best_runtime_s = best->runtime_s;
    entry.catalog = best->catalog;
    entry.plan = *plan;
    entries.push_back(std::move(entry));
  }
  return RetrievalIndex(embedder.spec(), options.canonicalize, options.space_profile, std::move(entries));
}

QuerySplit split_by_query(std::span<const ExecutionRecord> records, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie strictly between 0 and 1");
  }
  std::set<std::string> id_set;
  for (const auto& r : records) id_set.insert(r.query_id);
  std::vector<std::string> ids(id_set.begin(), id_set.end());

  QuerySplit split;
  if (ids.empty()) return split;

  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(ids.size())));
  n_test = std::max<std::size_t>(n_test, 1);
  if (ids.size() >= 2) n_test = std::min(n_test, ids.size() - 1);

  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::set<std::string> test_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));

  for (const auto& r : records) (test_ids.count(r.query_id) ? split.test : split.train).push_back(r);
  split.test_query_ids.assign(test_ids.begin(), test_ids.end());
  return split;
}

}  // namespace zest
