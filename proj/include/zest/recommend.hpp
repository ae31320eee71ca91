#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zest/embed.hpp"
#include "zest/index.hpp"
#include "zest/json_io.hpp"
#include "zest/oracle.hpp"
#include "zest/plan.hpp"
#include "zest/space.hpp"

namespace zest {

struct ZestParams {
  std::size_t k = 29;
  EmbedderSpec embedder;
  CanonicalizeOptions canonicalize;

  void validate() const;
};

struct RecommendedNeighbor {
  IndexKey key;
  double similarity = 0.0;
  Configuration best_config;
  double best_runtime_s = 0.0;
};

struct Recommendation {
  Configuration config;
  std::vector<RecommendedNeighbor> neighbors;
  double elapsed_ms = 0.0;
};

/// Clamped parameter-wise mean of the min(k, |index|) nearest entries. Takes
/// no cost evaluator: the probe query is never run.
///
/// Throws EmbedderMismatch when the embedder cannot produce vectors
/// comparable to the index's, EmptyIndex, and parse or embedding errors.
Recommendation recommend(std::string_view plan_text, const RetrievalIndex& index, const ZestParams& params,
                         const ConfigSpace& space);

/// Same, reusing an existing embedder (keeps a remote embedder's cache warm).
Recommendation recommend(std::string_view plan_text, const RetrievalIndex& index, const Embedder& embedder,
                         const ZestParams& params, const ConfigSpace& space);

/// Retrieval and aggregation for an already embedded probe.
Recommendation recommend_embedded(std::span<const float> probe, const RetrievalIndex& index, std::size_t k,
                                  const ConfigSpace& space);

ordered_json to_json(const Recommendation& rec);

/// Default k grid searched by select_hyperparameters.
inline constexpr std::size_t kDefaultKGrid[] = {1, 3, 5, 9, 15, 29, 45};

struct CvScore {
  std::size_t k = 0;
  EmbedderSpec embedder;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct SelectionResult {
  ZestParams params;
  /// Embedders outer, k inner, in candidate order.
  std::vector<CvScore> table;
  /// "regret" or "config_error".
  std::string metric;
};

/// K-fold cross-validation over query ids. Each held-out (query, size) key
/// is scored by regret = runtime(recommended) / runtime(stored optimum) - 1
/// under `evaluator`; a failed recommendation is charged the default
/// configuration's runtime. Without an evaluator, or when the evaluator has
/// no record for some configuration, every candidate is scored by the mean
/// range-normalized absolute difference from the stored optimum instead.
/// Ties keep the earliest candidate.
///
/// Throws InsufficientQueries when train has fewer distinct query ids than
/// folds, std::invalid_argument for folds < 2 or empty candidate lists.
SelectionResult select_hyperparameters(std::span<const ExecutionRecord> train, std::span<const std::size_t> candidates_k,
                                       std::span<const EmbedderSpec> candidates_embedder, int folds,
                                       const CostEvaluator* evaluator, const ConfigSpace& space,
                                       std::uint64_t seed = 0, const CanonicalizeOptions& canonicalize = {});

struct ExplainedNeighbor {
  RecommendedNeighbor neighbor;
  std::string plan;                         // canonical
  std::vector<std::string> shared_tokens;  // identifiers present in both plans, sorted
};

struct Explanation {
  std::string probe_plan;  // canonical
  std::vector<ExplainedNeighbor> neighbors;
  Configuration config;
};

Explanation explain(std::string_view plan_text, const RetrievalIndex& index, const ZestParams& params,
                    const ConfigSpace& space);

std::string render(const Explanation& e);
ordered_json to_json(const Explanation& e);

}  // namespace zest
