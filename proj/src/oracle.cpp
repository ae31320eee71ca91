#include "zest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include "zest/embed.hpp"
#include "zest/errors.hpp"

namespace zest {

IndexKey WorkloadSpec::key() const { return IndexKey{workload_id, std::llround(input_gb)}; }

void WorkloadSpec::validate() const {
  auto fail = [&](const std::string& what) { throw InvalidWorkload("workload " + workload_id + ": " + what); };
  if (workload_id.empty()) throw InvalidWorkload("workload_id must not be empty");
  if (!(input_gb > 0.0) || !std::isfinite(input_gb)) fail("input_gb must be positive");
  if (!(compute_intensity > 0.0) || !std::isfinite(compute_intensity)) fail("compute_intensity must be positive");
  if (!(mem_per_task_gb > 0.0) || !std::isfinite(mem_per_task_gb)) fail("mem_per_task_gb must be positive");
  if (!(shuffle_fraction >= 0.0 && shuffle_fraction <= 1.0)) fail("shuffle_fraction must lie in [0, 1]");
  if (!(driver_load > 0.0) || !std::isfinite(driver_load)) fail("driver_load must be positive");
}

ClusterSpec ClusterSpec::emr_like() { return {"emr", 40, 300}; }
ClusterSpec ClusterSpec::local_like() { return {"local", 125, 570}; }

ClusterSpec ClusterSpec::builtin(std::string_view profile) {
  if (profile == "emr") return emr_like();
  if (profile == "local") return local_like();
  throw std::invalid_argument("unknown cluster profile '" + std::string(profile) + "' (expected emr or local)");
}

SimulatorConstants SimulatorConstants::parse(std::istream& in, const std::string& source) {
  SimulatorConstants k;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = source + ":" + std::to_string(line_no);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError(where, "expected key = value");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const auto key = trim(line.substr(0, eq));
    const auto text = trim(line.substr(eq + 1));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw DataError(where, "value for " + key + " is not a number");
    }
    if (key == "memory_headroom") {
      k.memory_headroom = value;
    } else if (key == "spill_slope") {
      k.spill_slope = value;
    } else if (key == "kappa_net") {
      k.kappa_net = value;
    } else if (key == "kappa_task") {
      k.kappa_task = value;
    } else if (key == "noise_sigma") {
      k.noise_sigma = value;
    } else {
      throw DataError(where, "unknown simulator constant '" + key + "'");
    }
  }
  return k;
}

SimulatorConstants SimulatorConstants::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open simulator constants " + path.string());
  return parse(in, path.string());
}

bool over_committed(const Configuration& c, const ClusterSpec& cluster) {
  const auto cores = c.executor_instances * c.executor_cores;
  const auto memory = c.executor_instances * c.executor_memory_gb + c.driver_memory_gb;
  return cores > cluster.total_cores || memory > cluster.total_memory_gb;
}

std::optional<RuntimeBreakdown> simulate_breakdown(const WorkloadSpec& w, const Configuration& c,
                                                   const ClusterSpec& cluster, std::optional<std::uint64_t> noise_seed,
                                                   const SimulatorConstants& k) {
  w.validate();
  for (Param p : kAllParams) {
    if (c[p] < 1) throw std::invalid_argument(std::string(spark_property(p)) + " must be at least 1");
  }
  if (over_committed(c, cluster)) return std::nullopt;

  const double partitions = static_cast<double>(c.shuffle_partitions);
  const double workers = static_cast<double>(c.executor_instances * c.executor_cores);
  const double shuffled_gb = w.shuffle_fraction * w.input_gb;

  RuntimeBreakdown r{};
  r.compute_s = w.compute_intensity * w.input_gb / workers;

  const double per_partition_gb = shuffled_gb / partitions;
  const double bound = static_cast<double>(c.executor_memory_gb) / static_cast<double>(c.executor_cores) *
                       k.memory_headroom;
  r.spill_multiplier = per_partition_gb <= bound ? 1.0 : 1.0 + k.spill_slope * (per_partition_gb / bound - 1.0);
  r.shuffle_s = shuffled_gb * k.kappa_net * r.spill_multiplier / workers + partitions * k.kappa_task / workers;

  r.driver_s = w.driver_load * partitions /
               (static_cast<double>(c.driver_cores) * std::min(static_cast<double>(c.driver_memory_gb), w.driver_load));

  r.noise_factor = 1.0;
  if (noise_seed) {
    std::uint64_t seed = feature_hash(w.workload_id, *noise_seed);
    seed = feature_hash(std::to_string(std::llround(w.input_gb)) + to_string(c), seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    r.noise_factor = std::exp(k.noise_sigma * normal(rng));
  }
  r.total_s = (r.compute_s + r.shuffle_s + r.driver_s) * r.noise_factor;
  return r;
}

Evaluation simulate_runtime(const WorkloadSpec& w, const Configuration& c, const ClusterSpec& cluster,
                            std::optional<std::uint64_t> noise_seed, const SimulatorConstants& constants) {
  auto r = simulate_breakdown(w, c, cluster, noise_seed, constants);
  if (!r) return Evaluation::failed();
  return Evaluation::success(r->total_s);
}

SimulatorEvaluator::SimulatorEvaluator(std::vector<WorkloadSpec> suite, ClusterSpec cluster,
                                       SimulatorConstants constants, std::optional<std::uint64_t> noise_seed)
    : cluster_(std::move(cluster)), constants_(constants), noise_seed_(noise_seed) {
  for (auto& w : suite) {
    w.validate();
    auto key = w.key();
    if (!suite_.emplace(key, std::move(w)).second) {
      throw InvalidWorkload("duplicate workload " + key.query_id + "@" + std::to_string(key.input_gb));
    }
  }
}

const WorkloadSpec& SimulatorEvaluator::workload(const IndexKey& key) const {
  auto it = suite_.find(key);
  if (it == suite_.end()) {
    throw InvalidWorkload("no workload " + key.query_id + "@" + std::to_string(key.input_gb) + " in suite");
  }
  return it->second;
}

Evaluation SimulatorEvaluator::evaluate(const IndexKey& key, const Configuration& c) const {
  return simulate_runtime(workload(key), c, cluster_, noise_seed_, constants_);
}

ReplayEvaluator::ReplayEvaluator(std::span<const ExecutionRecord> dataset) {
  for (const auto& r : dataset) {
    auto [it, inserted] = runtimes_.try_emplace({IndexKey{r.query_id, r.input_gb}, r.config.as_tuple()}, r.runtime_s);
    if (!inserted) it->second = std::min(it->second, r.runtime_s);
  }
}

Evaluation ReplayEvaluator::evaluate(const IndexKey& key, const Configuration& c) const {
  auto it = runtimes_.find({key, c.as_tuple()});
  if (it == runtimes_.end()) return Evaluation::missing();
  return Evaluation::success(it->second);
}

Evaluation replay_evaluate(std::span<const ExecutionRecord> dataset, const IndexKey& key, const Configuration& c) {
  std::optional<double> best;
  for (const auto& r : dataset) {
    if (r.query_id == key.query_id && r.input_gb == key.input_gb && r.config == c) {
      best = best ? std::min(*best, r.runtime_s) : r.runtime_s;
    }
  }
  return best ? Evaluation::success(*best) : Evaluation::missing();
}

}  // namespace zest
