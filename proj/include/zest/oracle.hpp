#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zest/index.hpp"
#include "zest/records.hpp"
#include "zest/space.hpp"

namespace zest {

/// A synthetic query at one input size.
struct WorkloadSpec {
  std::string workload_id;
  std::string family_id;
  std::string catalog;
  double input_gb = 100.0;
  double compute_intensity = 1.0;  // core-seconds per GB
  double shuffle_fraction = 0.5;   // share of the input that is shuffled
  double mem_per_task_gb = 1.0;
  double driver_load = 1.0;  // scheduling cost units
  std::string plan_text;

  IndexKey key() const;

  /// Throws InvalidWorkload on non-positive sizes or intensities, or a
  /// shuffle fraction outside [0, 1].
  void validate() const;

  bool operator==(const WorkloadSpec&) const = default;
};

struct ClusterSpec {
  std::string name;
  std::int64_t total_cores = 40;
  std::int64_t total_memory_gb = 300;

  /// 40 cores, 300 GB.
  static ClusterSpec emr_like();
  /// 125 cores, 570 GB.
  static ClusterSpec local_like();
  /// "emr" or "local".
  static ClusterSpec builtin(std::string_view profile);
};

/// Every invented constant of the runtime model, in one place.
struct SimulatorConstants {
  double memory_headroom = 0.6;  // usable share of per-core executor memory before spilling
  double spill_slope = 2.0;      // extra shuffle cost per unit of overflow
  double kappa_net = 0.5;        // s per shuffled GB (per core)
  double kappa_task = 0.02;      // s per task
  double noise_sigma = 0.05;     // log-normal noise, only when a noise seed is given

  /// key = value lines; '#' starts a comment. Unknown keys are an error.
  static SimulatorConstants load(const std::filesystem::path& path);
  static SimulatorConstants parse(std::istream& in, const std::string& source = "<stream>");
};

/// Result of running (or looking up) one configuration.
struct Evaluation {
  enum class Status { ok, failure, not_recorded };

  Status status = Status::failure;
  double runtime_s = 0.0;

  static Evaluation success(double runtime_s) { return {Status::ok, runtime_s}; }
  static Evaluation failed() { return {Status::failure, 0.0}; }
  static Evaluation missing() { return {Status::not_recorded, 0.0}; }

  bool ok() const noexcept { return status == Status::ok; }
};

struct RuntimeBreakdown {
  double compute_s;
  double shuffle_s;
  double driver_s;
  double spill_multiplier;
  double noise_factor;
  double total_s;
};

/// True when the configuration asks for more cores or memory than the
/// cluster has. Exactly using the capacity is allowed.
bool over_committed(const Configuration& c, const ClusterSpec& cluster);

/// Closed-form runtime. With W = instances * executor cores and P = shuffle
/// partitions:
///
///   compute = intensity * input / W
///   b       = shuffle_fraction * input / P            (GB per shuffle partition)
///   bound   = executor_memory / executor_cores * headroom
///   m       = 1 if b <= bound else 1 + spill_slope * (b / bound - 1)
///   shuffle = shuffle_fraction * input * kappa_net * m / W + P * kappa_task / W
///   driver  = driver_load * P / (driver_cores * min(driver_memory, driver_load))
///
/// Returns nullopt on over-commitment. Throws InvalidWorkload.
std::optional<RuntimeBreakdown> simulate_breakdown(const WorkloadSpec& w, const Configuration& c,
                                                   const ClusterSpec& cluster,
                                                   std::optional<std::uint64_t> noise_seed = std::nullopt,
                                                   const SimulatorConstants& constants = {});

Evaluation simulate_runtime(const WorkloadSpec& w, const Configuration& c, const ClusterSpec& cluster,
                            std::optional<std::uint64_t> noise_seed = std::nullopt,
                            const SimulatorConstants& constants = {});

/// Anything that can price a configuration for a (query, input size) key.
class CostEvaluator {
 public:
  virtual ~CostEvaluator() = default;
  virtual Evaluation evaluate(const IndexKey& key, const Configuration& c) const = 0;
};

/// Prices configurations with simulate_runtime over a workload suite.
class SimulatorEvaluator final : public CostEvaluator {
 public:
  SimulatorEvaluator(std::vector<WorkloadSpec> suite, ClusterSpec cluster, SimulatorConstants constants = {},
                     std::optional<std::uint64_t> noise_seed = std::nullopt);

  Evaluation evaluate(const IndexKey& key, const Configuration& c) const override;

  const WorkloadSpec& workload(const IndexKey& key) const;
  const ClusterSpec& cluster() const noexcept { return cluster_; }

 private:
  std::map<IndexKey, WorkloadSpec> suite_;
  ClusterSpec cluster_;
  SimulatorConstants constants_;
  std::optional<std::uint64_t> noise_seed_;
};

/// Exact-match lookup over recorded executions. Never interpolates.
class ReplayEvaluator final : public CostEvaluator {
 public:
  explicit ReplayEvaluator(std::span<const ExecutionRecord> dataset);

  Evaluation evaluate(const IndexKey& key, const Configuration& c) const override;

 private:
  std::map<std::pair<IndexKey, std::array<std::int64_t, kParamCount>>, double> runtimes_;
};

/// Scans `dataset` for the key and full configuration tuple; duplicates
/// resolve to the minimum runtime.
Evaluation replay_evaluate(std::span<const ExecutionRecord> dataset, const IndexKey& key, const Configuration& c);

/// Families of similar workloads.
///
/// Each family draws base resource parameters and a plan template over its
/// own tables; members jitter the parameters by at most 10% and vary filter
/// literals, with some members inserting a Project or Sort node. Every
/// member is emitted once per input size; the plan names the scale-specific
/// database. Deterministic given the seed.
std::vector<WorkloadSpec> generate_suite(int n_families, int members_per_family, std::span<const double> sizes_gb,
                                         std::uint64_t seed);

std::vector<WorkloadSpec> read_suite(const std::filesystem::path& path);
std::vector<WorkloadSpec> read_suite(std::istream& in, const std::string& source = "<stream>");
void write_suite(std::ostream& out, std::span<const WorkloadSpec> suite);
void write_suite(const std::filesystem::path& path, std::span<const WorkloadSpec> suite);

}  // namespace zest
