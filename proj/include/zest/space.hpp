#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace zest {

/// The six tuned Spark parameters, in a fixed order used for tuple
/// comparison, iteration and serialization.
enum class Param : std::size_t {
  shuffle_partitions = 0,
  executor_instances,
  driver_memory_gb,
  driver_cores,
  executor_memory_gb,
  executor_cores,
};

inline constexpr std::size_t kParamCount = 6;

inline constexpr std::array<Param, kParamCount> kAllParams = {
    Param::shuffle_partitions, Param::executor_instances, Param::driver_memory_gb,
    Param::driver_cores,       Param::executor_memory_gb, Param::executor_cores,
};

/// Spark property name, e.g. "spark.sql.shuffle.partitions".
std::string_view spark_property(Param p);
std::optional<Param> param_from_spark_property(std::string_view name);

struct Configuration {
  std::int64_t shuffle_partitions = 200;
  std::int64_t executor_instances = 4;
  std::int64_t driver_memory_gb = 1;
  std::int64_t driver_cores = 1;
  std::int64_t executor_memory_gb = 1;
  std::int64_t executor_cores = 1;

  std::int64_t& operator[](Param p);
  std::int64_t operator[](Param p) const;

  std::array<std::int64_t, kParamCount> as_tuple() const;

  bool operator==(const Configuration&) const = default;
  auto operator<=>(const Configuration&) const = default;
};

std::string to_string(const Configuration& c);

struct Range {
  std::int64_t lo;
  std::int64_t hi;

  bool operator==(const Range&) const = default;
};

class ConfigSpace {
 public:
  /// Throws std::invalid_argument if any range has lo > hi.
  ConfigSpace(std::string profile_name, std::array<Range, kParamCount> ranges);

  /// Amazon EMR ranges.
  static ConfigSpace emr();
  /// The on-premise cluster ranges.
  static ConfigSpace local();
  /// "emr" or "local"; throws std::invalid_argument otherwise.
  static ConfigSpace builtin(std::string_view name);

  /// Reads {"profile_name": ..., "ranges": {"spark.sql.shuffle.partitions": [lo, hi], ...}}.
  /// Parameters missing from "ranges" inherit the EMR range.
  static ConfigSpace load(const std::filesystem::path& path);
  static ConfigSpace from_json_text(std::string_view text);
  std::string to_json_text() const;

  const std::string& profile_name() const noexcept { return profile_name_; }
  const Range& range(Param p) const { return ranges_[static_cast<std::size_t>(p)]; }
  const std::array<Range, kParamCount>& ranges() const noexcept { return ranges_; }

  bool contains(const Configuration& c) const;

  bool operator==(const ConfigSpace&) const = default;

 private:
  std::string profile_name_;
  std::array<Range, kParamCount> ranges_;
};

/// Spark's shipped defaults: (200, 4, 1, 1, 1, 1).
Configuration default_config();

Configuration clamp(const Configuration& c, const ConfigSpace& space);

/// Per-parameter arithmetic mean rounded half-up, then clamped.
/// Throws EmptyList for an empty input.
Configuration aggregate_mean(std::span<const Configuration> configs, const ConfigSpace& space);

/// Uniform integer draw per parameter. The generator is any
/// UniformRandomBitGenerator; the library uses std::mt19937_64 throughout.
template <class Rng>
Configuration random_sample(const ConfigSpace& space, Rng& rng);

/// Half-up rounding of sum / count using exact integer arithmetic.
std::int64_t round_half_up_div(std::int64_t sum, std::int64_t count);

}  // namespace zest

#include <random>

namespace zest {

template <class Rng>
Configuration random_sample(const ConfigSpace& space, Rng& rng) {
  Configuration c;
  for (Param p : kAllParams) {
    const auto& r = space.range(p);
    std::uniform_int_distribution<std::int64_t> dist(r.lo, r.hi);
    c[p] = dist(rng);
  }
  return c;
}

}  // namespace zest
