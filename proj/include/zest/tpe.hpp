#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "zest/index.hpp"
#include "zest/oracle.hpp"
#include "zest/space.hpp"

namespace zest {

struct TpeParams {
  int n_startup = 10;
  int n_candidates = 24;
  double gamma_fraction = 0.25;
  double bandwidth_floor = 1.0;  // in integer-parameter units
  /// Kernel width as a share of the parameter range, before the m^(-1/5) shrink.
  double bandwidth_scale = 0.03;
  int gamma_cap = 25;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct Trial {
  int number = 0;
  Configuration config;
  std::optional<double> cost_s;  // nullopt: the run failed

  bool failed() const noexcept { return !cost_s.has_value(); }
  bool operator==(const Trial&) const = default;
};

/// One optimization run. Single writer: callers serialize suggest/tell.
class Study {
 public:
  Study(ConfigSpace space, std::uint64_t seed, TpeParams params = {});

  const std::vector<Trial>& trials() const noexcept { return trials_; }
  const ConfigSpace& space() const noexcept { return space_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const TpeParams& params() const noexcept { return params_; }

  /// Trial 0 is the clamped default configuration, the next n_startup - 1
  /// are uniform draws, the rest come from the TPE density ratio. Depends
  /// only on the seed and the recorded history.
  Configuration suggest() const;

  /// Records a run; nullopt marks a failure. Throws std::invalid_argument
  /// for a non-positive cost.
  const Trial& tell(const Configuration& config, std::optional<double> cost_s);

  /// Lowest-cost successful trial; the earliest wins ties.
  std::optional<Trial> best() const;

  /// Best successful cost after each trial (nullopt until the first success).
  std::vector<std::optional<double>> best_so_far() const;

 private:
  ConfigSpace space_;
  std::uint64_t seed_;
  TpeParams params_;
  std::vector<Trial> trials_;
};

/// Observed point for the dimension-agnostic sampler.
struct Observation {
  std::vector<std::int64_t> point;
  double cost;
};

/// TPE proposal over integer boxes. Falls back to a uniform draw when fewer
/// than two observations are given.
std::vector<std::int64_t> tpe_propose(std::span<const Range> ranges, std::span<const Observation> history,
                                      const TpeParams& params, std::mt19937_64& rng);

/// Generator for trial `number` of a study seeded with `seed`.
std::mt19937_64 trial_rng(std::uint64_t seed, int number);

using Objective = std::function<Evaluation(const Configuration&)>;

/// Runs exactly n_iters suggest/evaluate/tell rounds. Objective exceptions
/// and unrecorded configurations become failed trials.
Study optimize(const ConfigSpace& space, const Objective& objective, int n_iters = 40, std::uint64_t seed = 0,
               const TpeParams& params = {});

/// Baseline with the same budget: the default configuration, then uniform draws.
Study random_search(const ConfigSpace& space, const Objective& objective, int n_iters = 40, std::uint64_t seed = 0);

/// Per-trial cost with failures charged `failure_penalty_s`.
std::vector<double> cost_schedule(const Study& study, double failure_penalty_s);

/// base_seed XOR hash(query_id, input_gb).
std::uint64_t study_seed(std::uint64_t base_seed, const IndexKey& key);

struct SuiteStudy {
  IndexKey key;
  Study study;
};

/// One study per key, `parallelism` at a time. Results follow `keys` order
/// and do not depend on the parallelism degree.
std::vector<SuiteStudy> optimize_suite(const ConfigSpace& space, const CostEvaluator& evaluator,
                                       std::span<const IndexKey> keys, int n_iters = 40, std::uint64_t base_seed = 0,
                                       const TpeParams& params = {}, unsigned parallelism = 1);

/// JSON Lines, one trial per line, in the execution-record layout; failed
/// trials carry "runtime_s": null and "status": "failure" so ingestion skips them.
void write_study_records(std::ostream& out, const SuiteStudy& s, const WorkloadSpec& workload,
                         const std::string& cluster_profile);

}  // namespace zest
