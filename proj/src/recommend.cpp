#include "zest/recommend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <chrono>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "zest/errors.hpp"

namespace zest {

namespace {

void check_compatible(const EmbedderSpec& spec, const RetrievalIndex& index) {
  if (!compatible(spec, index.embedder_spec())) {
    const auto& want = index.embedder_spec();
    throw EmbedderMismatch("embedder " + spec.model_id + "/" + std::to_string(spec.dimension) +
                           " does not match the index's " + want.model_id + "/" + std::to_string(want.dimension));
  }
}

std::string canonical_probe(std::string_view plan_text, const RetrievalIndex& index) {
  return canonicalize(parse_plan(plan_text), index.canonicalize_options());
}

bool is_identifier(const std::string& token) {
  if (token.empty()) return false;
  const auto c = static_cast<unsigned char>(token.front());
  return std::isalpha(c) != 0 || c == '_' || c == '`' || c >= 0x80;
}

double config_error(const Configuration& a, const Configuration& b, const ConfigSpace& space) {
  double total = 0.0;
  for (Param p : kAllParams) {
    const auto& r = space.range(p);
    if (r.hi > r.lo) total += std::abs(static_cast<double>(a[p] - b[p])) / static_cast<double>(r.hi - r.lo);
  }
  return total / static_cast<double>(kParamCount);
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace

void ZestParams::validate() const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  embedder.validate();
}

Recommendation recommend_embedded(std::span<const float> probe, const RetrievalIndex& index, std::size_t k,
                                  const ConfigSpace& space) {
  const auto hits = query(index, probe, k);
  Recommendation rec;
  std::vector<Configuration> configs;
  configs.reserve(hits.size());
  for (const auto& h : hits) {
    configs.push_back(h.entry->best_config);
    rec.neighbors.push_back({h.entry->key, h.similarity, h.entry->best_config, h.entry->best_runtime_s});
  }
  rec.config = aggregate_mean(configs, space);
  return rec;
}

Recommendation recommend(std::string_view plan_text, const RetrievalIndex& index, const Embedder& embedder,
                         const ZestParams& params, const ConfigSpace& space) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  check_compatible(embedder.spec(), index);
  if (index.empty()) throw EmptyIndex();
  const auto probe = embedder.embed(canonical_probe(plan_text, index));
  auto rec = recommend_embedded(probe.values, index, params.k, space);
  rec.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

Recommendation recommend(std::string_view plan_text, const RetrievalIndex& index, const ZestParams& params,
                         const ConfigSpace& space) {
  check_compatible(params.embedder, index);
  const auto embedder = make_embedder(params.embedder);
  return recommend(plan_text, index, *embedder, params, space);
}

ordered_json to_json(const Recommendation& rec) {
  ordered_json j;
  j["config"] = config_to_json(rec.config);
  auto neighbors = ordered_json::array();
  for (const auto& n : rec.neighbors) {
    ordered_json jn;
    jn["query_id"] = n.key.query_id;
    jn["input_gb"] = n.key.input_gb;
    jn["similarity"] = n.similarity;
    jn["best_config"] = config_to_json(n.best_config);
    jn["best_runtime_s"] = n.best_runtime_s;
    neighbors.push_back(std::move(jn));
  }
  j["neighbors"] = std::move(neighbors);
  j["elapsed_ms"] = rec.elapsed_ms;
  return j;
}

SelectionResult select_hyperparameters(std::span<const ExecutionRecord> train, std::span<const std::size_t> candidates_k,
                                       std::span<const EmbedderSpec> candidates_embedder, int folds,
                                       const CostEvaluator* evaluator, const ConfigSpace& space, std::uint64_t seed,
                                       const CanonicalizeOptions& canonicalize) {
  if (folds < 2) throw std::invalid_argument("folds must be at least 2");
  if (candidates_k.empty() || candidates_embedder.empty()) throw std::invalid_argument("candidate lists must not be empty");
  for (auto k : candidates_k) {
    if (k < 1) throw std::invalid_argument("candidate k must be at least 1");
  }

  std::set<std::string> id_set;
  for (const auto& r : train) id_set.insert(r.query_id);
  if (id_set.size() < static_cast<std::size_t>(folds)) {
    throw InsufficientQueries("cross-validation needs at least " + std::to_string(folds) + " distinct queries, got " +
                              std::to_string(id_set.size()));
  }
  std::vector<std::string> ids(id_set.begin(), id_set.end());
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < ids.size(); ++i) fold_of[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

  const std::size_t k_max = *std::max_element(candidates_k.begin(), candidates_k.end());

  struct Item {
    IndexKey key;
    Configuration recommended;
    Configuration best;
    double best_runtime_s;
  };
  // items[candidate][fold]
  std::vector<std::vector<std::vector<Item>>> items;

  for (const auto& spec : candidates_embedder) {
    const auto embedder = make_embedder(spec);
    const auto full = build_index(train, *embedder, IndexBuildOptions{canonicalize, space.profile_name()});
    std::vector<std::vector<std::vector<Item>>> per_k(candidates_k.size(),
                                                      std::vector<std::vector<Item>>(static_cast<std::size_t>(folds)));
    for (int f = 0; f < folds; ++f) {
      const auto fold_index = full.filtered([&](const IndexEntry& e) { return fold_of.at(e.key.query_id) != f; });
      for (const auto& e : full.entries()) {
        if (fold_of.at(e.key.query_id) != f) continue;
        const auto hits = query(fold_index, e.embedding.values, k_max);
        for (std::size_t ki = 0; ki < candidates_k.size(); ++ki) {
          const auto n = std::min(candidates_k[ki], hits.size());
          std::vector<Configuration> configs;
          for (std::size_t i = 0; i < n; ++i) configs.push_back(hits[i].entry->best_config);
          per_k[ki][static_cast<std::size_t>(f)].push_back(
              {e.key, aggregate_mean(configs, space), e.best_config, e.best_runtime_s});
        }
      }
    }
    for (auto& v : per_k) items.push_back(std::move(v));
  }

  std::map<std::pair<IndexKey, std::array<std::int64_t, kParamCount>>, Evaluation> cache;
  auto evaluate = [&](const IndexKey& key, const Configuration& c) {
    auto [it, inserted] = cache.try_emplace({key, c.as_tuple()});
    if (inserted) it->second = evaluator->evaluate(key, c);
    return it->second;
  };

  bool use_regret = evaluator != nullptr;
  if (use_regret) {
    const auto fallback = clamp(default_config(), space);
    for (const auto& cand : items) {
      for (const auto& fold : cand) {
        for (const auto& item : fold) {
          for (const auto& c : {item.recommended, item.best, fallback}) {
            if (evaluate(item.key, c).status == Evaluation::Status::not_recorded) use_regret = false;
          }
          if (!use_regret) break;
        }
        if (!use_regret) break;
      }
      if (!use_regret) break;
    }
  }

  auto score = [&](const Item& item) {
    if (!use_regret) return config_error(item.recommended, item.best, space);
    const auto ref = evaluate(item.key, item.best);
    const double ref_s = ref.ok() ? ref.runtime_s : item.best_runtime_s;
    auto got = evaluate(item.key, item.recommended);
    if (!got.ok()) {
      got = evaluate(item.key, clamp(default_config(), space));
      if (!got.ok()) return 1.0;
    }
    return got.runtime_s / ref_s - 1.0;
  };

  SelectionResult result;
  result.metric = use_regret ? "regret" : "config_error";
  std::size_t best_idx = 0;
  for (std::size_t ei = 0; ei < candidates_embedder.size(); ++ei) {
    for (std::size_t ki = 0; ki < candidates_k.size(); ++ki) {
      const auto& cand = items[ei * candidates_k.size() + ki];
      CvScore s;
      s.k = candidates_k[ki];
      s.embedder = candidates_embedder[ei];
      for (const auto& fold : cand) {
        std::vector<double> scores;
        for (const auto& item : fold) scores.push_back(score(item));
        s.fold_scores.push_back(mean(scores));
      }
      s.mean_score = mean(s.fold_scores);
      if (!result.table.empty() && s.mean_score < result.table[best_idx].mean_score) {
        best_idx = result.table.size();
      }
      result.table.push_back(std::move(s));
    }
  }
  result.params.k = result.table[best_idx].k;
  result.params.embedder = result.table[best_idx].embedder;
  result.params.canonicalize = canonicalize;
  return result;
}

Explanation explain(std::string_view plan_text, const RetrievalIndex& index, const ZestParams& params,
                    const ConfigSpace& space) {
  const auto rec = recommend(plan_text, index, params, space);
  Explanation e;
  e.probe_plan = canonical_probe(plan_text, index);
  e.config = rec.config;
  std::set<std::string> probe_tokens;
  for (auto& t : tokenize(e.probe_plan)) {
    if (is_identifier(t)) probe_tokens.insert(std::move(t));
  }
  for (const auto& n : rec.neighbors) {
    ExplainedNeighbor en;
    en.neighbor = n;
    en.plan = index.find(n.key)->plan;
    std::set<std::string> shared;
    for (auto& t : tokenize(en.plan)) {
      if (probe_tokens.count(t) != 0) shared.insert(std::move(t));
    }
    en.shared_tokens.assign(shared.begin(), shared.end());
    e.neighbors.push_back(std::move(en));
  }
  return e;
}

std::string render(const Explanation& e) {
  std::ostringstream out;
  out << "probe plan:\n";
  std::istringstream lines(e.probe_plan);
  for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
  out << "recommended: " << to_string(e.config) << '\n';
  int rank = 0;
  for (const auto& n : e.neighbors) {
    out << '\n'
        << '#' << ++rank << ' ' << n.neighbor.key.query_id << " @ " << n.neighbor.key.input_gb << " GB"
        << "  similarity " << std::fixed << std::setprecision(4) << n.neighbor.similarity << "  best runtime "
        << std::setprecision(1) << n.neighbor.best_runtime_s << " s\n";
    out.unsetf(std::ios::floatfield);
    out << "  config: " << to_string(n.neighbor.best_config) << '\n';
    out << "  shared:";
    if (n.shared_tokens.empty()) out << " (none)";
    for (const auto& t : n.shared_tokens) out << ' ' << t;
    out << '\n';
  }
  return out.str();
}

ordered_json to_json(const Explanation& e) {
  ordered_json j;
  j["probe_plan"] = e.probe_plan;
  j["config"] = config_to_json(e.config);
  auto neighbors = ordered_json::array();
  for (const auto& n : e.neighbors) {
    ordered_json jn;
    jn["query_id"] = n.neighbor.key.query_id;
    jn["input_gb"] = n.neighbor.key.input_gb;
    jn["similarity"] = n.neighbor.similarity;
    jn["best_config"] = config_to_json(n.neighbor.best_config);
    jn["best_runtime_s"] = n.neighbor.best_runtime_s;
    jn["shared_tokens"] = n.shared_tokens;
    jn["plan"] = n.plan;
    neighbors.push_back(std::move(jn));
  }
  j["neighbors"] = std::move(neighbors);
  return j;
}

}  // namespace zest
