#include "zest/tpe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "zest/embed.hpp"
#include "zest/json_io.hpp"

namespace zest {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

/// Gaussian kernels truncated to [lo, hi] plus one uniform prior kernel, all
/// weighted equally.
class Parzen {
 public:
  Parzen(std::vector<double> centers, double lo, double hi, double bandwidth_floor, double bandwidth_scale)
      : centers_(std::move(centers)), lo_(lo), hi_(hi) {
    const double m = static_cast<double>(std::max<std::size_t>(centers_.size(), 1));
    sigma_ = std::max(bandwidth_floor, bandwidth_scale * (hi_ - lo_) * std::pow(m, -0.2));
    mass_.reserve(centers_.size());
    for (double mu : centers_) {
      mass_.push_back(std::max(normal_cdf((hi_ - mu) / sigma_) - normal_cdf((lo_ - mu) / sigma_), 1e-300));
    }
  }

  double pdf(double x) const {
    double total = 1.0 / (hi_ - lo_);
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      const double z = (x - centers_[i]) / sigma_;
      total += kInvSqrt2Pi * std::exp(-0.5 * z * z) / (sigma_ * mass_[i]);
    }
    return total / static_cast<double>(centers_.size() + 1);
  }

  double sample(std::mt19937_64& rng) const {
    const auto j = std::uniform_int_distribution<std::size_t>(0, centers_.size())(rng);
    if (j == centers_.size()) return std::uniform_real_distribution<double>(lo_, hi_)(rng);
    std::normal_distribution<double> normal(centers_[j], sigma_);
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double x = normal(rng);
      if (x >= lo_ && x <= hi_) return x;
    }
    return std::clamp(normal(rng), lo_, hi_);
  }

 private:
  std::vector<double> centers_;
  std::vector<double> mass_;
  double lo_;
  double hi_;
  double sigma_ = 1.0;
};

std::int64_t round_to_range(double x, const Range& r) {
  return std::clamp(static_cast<std::int64_t>(std::floor(x + 0.5)), r.lo, r.hi);
}

std::vector<std::int64_t> uniform_point(std::span<const Range> ranges, std::mt19937_64& rng) {
  std::vector<std::int64_t> point;
  point.reserve(ranges.size());
  for (const auto& r : ranges) point.push_back(std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(rng));
  return point;
}

std::vector<std::int64_t> to_point(const Configuration& c) {
  const auto t = c.as_tuple();
  return {t.begin(), t.end()};
}

Configuration from_point(std::span<const std::int64_t> point) {
  Configuration c;
  for (Param p : kAllParams) c[p] = point[static_cast<std::size_t>(p)];
  return c;
}

Evaluation guarded(const Objective& objective, const Configuration& c) {
  try {
    auto e = objective(c);
    if (e.ok() && !(e.runtime_s > 0.0 && std::isfinite(e.runtime_s))) return Evaluation::failed();
    return e;
  } catch (const std::exception&) {
    return Evaluation::failed();
  }
}

}  // namespace

void TpeParams::validate() const {
  if (n_startup < 1) throw std::invalid_argument("n_startup must be at least 1");
  if (n_candidates < 1) throw std::invalid_argument("n_candidates must be at least 1");
  if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0)) throw std::invalid_argument("gamma_fraction must lie in (0, 1)");
  if (!(bandwidth_floor > 0.0)) throw std::invalid_argument("bandwidth_floor must be positive");
  if (!(bandwidth_scale > 0.0)) throw std::invalid_argument("bandwidth_scale must be positive");
  if (gamma_cap < 1) throw std::invalid_argument("gamma_cap must be at least 1");
}

std::vector<std::int64_t> tpe_propose(std::span<const Range> ranges, std::span<const Observation> history,
                                      const TpeParams& params, std::mt19937_64& rng) {
  const std::size_t n = history.size();
  if (n < 2) return uniform_point(ranges, rng);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return history[a].cost < history[b].cost; });
  const auto n_good = std::min<std::size_t>(
      static_cast<std::size_t>(std::ceil(params.gamma_fraction * static_cast<double>(n))),
      static_cast<std::size_t>(params.gamma_cap));
  if (n_good == 0 || n_good >= n) return uniform_point(ranges, rng);

  std::vector<Parzen> good;
  std::vector<Parzen> bad;
  for (std::size_t d = 0; d < ranges.size(); ++d) {
    std::vector<double> g_centers;
    std::vector<double> b_centers;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(history[order[i]].point.at(d));
      (i < n_good ? g_centers : b_centers).push_back(v);
    }
    // Half a unit of slack on each side gives the end values a full share.
    const double lo = static_cast<double>(ranges[d].lo) - 0.5;
    const double hi = static_cast<double>(ranges[d].hi) + 0.5;
    good.emplace_back(std::move(g_centers), lo, hi, params.bandwidth_floor, params.bandwidth_scale);
    bad.emplace_back(std::move(b_centers), lo, hi, params.bandwidth_floor, params.bandwidth_scale);
  }

  std::vector<double> best_draw;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<double> draw(ranges.size());
  for (int c = 0; c < params.n_candidates; ++c) {
    double score = 0.0;
    for (std::size_t d = 0; d < ranges.size(); ++d) {
      draw[d] = good[d].sample(rng);
      score += std::log(good[d].pdf(draw[d])) - std::log(bad[d].pdf(draw[d]));
    }
    if (best_draw.empty() || score > best_score) {
      best_score = score;
      best_draw = draw;
    }
  }

  std::vector<std::int64_t> point(ranges.size());
  for (std::size_t d = 0; d < ranges.size(); ++d) point[d] = round_to_range(best_draw[d], ranges[d]);
  return point;
}

std::mt19937_64 trial_rng(std::uint64_t seed, int number) {
  return std::mt19937_64(feature_hash("trial:" + std::to_string(number), seed));
}

Study::Study(ConfigSpace space, std::uint64_t seed, TpeParams params)
    : space_(std::move(space)), seed_(seed), params_(params) {
  params_.validate();
}

Configuration Study::suggest() const {
  const int number = static_cast<int>(trials_.size());
  if (number == 0) return clamp(default_config(), space_);
  auto rng = trial_rng(seed_, number);
  if (number < params_.n_startup) return random_sample(space_, rng);

  std::vector<Observation> history;
  for (const auto& t : trials_) {
    if (!t.failed()) history.push_back({to_point(t.config), *t.cost_s});
  }
  const auto& ranges = space_.ranges();
  return from_point(tpe_propose(ranges, history, params_, rng));
}

const Trial& Study::tell(const Configuration& config, std::optional<double> cost_s) {
  if (cost_s && !(*cost_s > 0.0 && std::isfinite(*cost_s))) {
    throw std::invalid_argument("trial cost must be positive and finite");
  }
  trials_.push_back(Trial{static_cast<int>(trials_.size()), config, cost_s});
  return trials_.back();
}

std::optional<Trial> Study::best() const {
  const Trial* best = nullptr;
  for (const auto& t : trials_) {
    if (!t.failed() && (best == nullptr || *t.cost_s < *best->cost_s)) best = &t;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

std::vector<std::optional<double>> Study::best_so_far() const {
  std::vector<std::optional<double>> out;
  std::optional<double> running;
  for (const auto& t : trials_) {
    if (!t.failed() && (!running || *t.cost_s < *running)) running = t.cost_s;
    out.push_back(running);
  }
  return out;
}

Study optimize(const ConfigSpace& space, const Objective& objective, int n_iters, std::uint64_t seed,
               const TpeParams& params) {
  if (n_iters < 1) throw std::invalid_argument("n_iters must be at least 1");
  Study study(space, seed, params);
  for (int i = 0; i < n_iters; ++i) {
    const auto config = study.suggest();
    const auto e = guarded(objective, config);
    study.tell(config, e.ok() ? std::optional<double>(e.runtime_s) : std::nullopt);
  }
  return study;
}

Study random_search(const ConfigSpace& space, const Objective& objective, int n_iters, std::uint64_t seed) {
  TpeParams params;
  params.n_startup = std::max(n_iters, 1);
  return optimize(space, objective, n_iters, seed, params);
}

std::vector<double> cost_schedule(const Study& study, double failure_penalty_s) {
  std::vector<double> out;
  out.reserve(study.trials().size());
  for (const auto& t : study.trials()) out.push_back(t.failed() ? failure_penalty_s : *t.cost_s);
  return out;
}

std::uint64_t study_seed(std::uint64_t base_seed, const IndexKey& key) {
  return base_seed ^ feature_hash(key.query_id + '\x1f' + std::to_string(key.input_gb));
}

std::vector<SuiteStudy> optimize_suite(const ConfigSpace& space, const CostEvaluator& evaluator,
                                       std::span<const IndexKey> keys, int n_iters, std::uint64_t base_seed,
                                       const TpeParams& params, unsigned parallelism) {
  params.validate();
  std::vector<std::optional<Study>> studies(keys.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < keys.size(); i = next++) {
      try {
        const auto& key = keys[i];
        studies[i] = optimize(
            space, [&](const Configuration& c) { return evaluator.evaluate(key, c); }, n_iters,
            study_seed(base_seed, key), params);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  const unsigned n_threads = std::clamp<unsigned>(parallelism, 1, static_cast<unsigned>(std::max<std::size_t>(keys.size(), 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<SuiteStudy> out;
  out.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) out.push_back({keys[i], std::move(*studies[i])});
  return out;
}

void write_study_records(std::ostream& out, const SuiteStudy& s, const WorkloadSpec& workload,
                         const std::string& cluster_profile) {
  for (const auto& t : s.study.trials()) {
    ordered_json j;
    j["query_id"] = s.key.query_id;
    j["catalog"] = workload.catalog;
    j["input_gb"] = s.key.input_gb;
    j["logical_plan"] = workload.plan_text;
    j["config"] = config_to_json(t.config);
    j["runtime_s"] = t.cost_s ? ordered_json(*t.cost_s) : ordered_json(nullptr);
    j["cluster_profile"] = cluster_profile;
    j["status"] = t.failed() ? "failure" : "success";
    j["trial"] = t.number;
    out << j.dump() << '\n';
  }
}

}  // namespace zest
