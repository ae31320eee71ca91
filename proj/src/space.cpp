#include "zest/space.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "zest/errors.hpp"

namespace zest {

namespace {

constexpr std::array<std::string_view, kParamCount> kSparkNames = {
    "spark.sql.shuffle.partitions", "spark.executor.instances", "spark.driver.memory",
    "spark.driver.cores",           "spark.executor.memory",    "spark.executor.cores",
};

constexpr std::size_t idx(Param p) { return static_cast<std::size_t>(p); }

}  // namespace

std::string_view spark_property(Param p) { return kSparkNames[idx(p)]; }

std::optional<Param> param_from_spark_property(std::string_view name) {
  for (Param p : kAllParams) {
    if (kSparkNames[idx(p)] == name) return p;
  }
  return std::nullopt;
}

std::int64_t& Configuration::operator[](Param p) {
  switch (p) {
    case Param::shuffle_partitions:
      return shuffle_partitions;
    case Param::executor_instances:
      return executor_instances;
    case Param::driver_memory_gb:
      return driver_memory_gb;
    case Param::driver_cores:
      return driver_cores;
    case Param::executor_memory_gb:
      return executor_memory_gb;
    case Param::executor_cores:
      return executor_cores;
  }
  throw std::out_of_range("unknown parameter");
}

std::int64_t Configuration::operator[](Param p) const { return const_cast<Configuration&>(*this)[p]; }

std::array<std::int64_t, kParamCount> Configuration::as_tuple() const {
  return {shuffle_partitions, executor_instances, driver_memory_gb,
          driver_cores,       executor_memory_gb, executor_cores};
}

std::string to_string(const Configuration& c) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (i > 0) out << ", ";
    out << c[kAllParams[i]];
  }
  out << ')';
  return out.str();
}

ConfigSpace::ConfigSpace(std::string profile_name, std::array<Range, kParamCount> ranges)
    : profile_name_(std::move(profile_name)), ranges_(ranges) {
  for (Param p : kAllParams) {
    const auto& r = ranges_[idx(p)];
    if (r.lo > r.hi) {
      throw std::invalid_argument("range for " + std::string(spark_property(p)) + " has lo > hi");
    }
  }
}

ConfigSpace ConfigSpace::emr() {
  return ConfigSpace("emr", {{{50, 1000}, {1, 28}, {1, 44}, {1, 7}, {1, 44}, {1, 7}}});
}

ConfigSpace ConfigSpace::local() {
  return ConfigSpace("local", {{{50, 1000}, {1, 180}, {1, 9}, {1, 5}, {1, 60}, {1, 10}}});
}

ConfigSpace ConfigSpace::builtin(std::string_view name) {
  if (name == "emr") return emr();
  if (name == "local") return local();
  throw std::invalid_argument("unknown cluster profile '" + std::string(name) + "' (expected emr or local)");
}

ConfigSpace ConfigSpace::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("profile", e.what());
  }
  if (!j.is_object() || !j.contains("profile_name") || !j["profile_name"].is_string()) {
    throw DataError("profile", "missing string field \"profile_name\"");
  }
  auto ranges = emr().ranges();
  if (j.contains("ranges")) {
    const auto& jr = j["ranges"];
    if (!jr.is_object()) throw DataError("profile", "\"ranges\" must be an object");
    for (const auto& [key, value] : jr.items()) {
      auto p = param_from_spark_property(key);
      if (!p) throw DataError("profile", "unknown parameter \"" + key + "\"");
      if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() || !value[1].is_number_integer()) {
        throw DataError("profile", "range for \"" + key + "\" must be [lo, hi] integers");
      }
      ranges[idx(*p)] = {value[0].get<std::int64_t>(), value[1].get<std::int64_t>()};
    }
  }
  try {
    return ConfigSpace(j["profile_name"].get<std::string>(), ranges);
  } catch (const std::invalid_argument& e) {
    throw DataError("profile", e.what());
  }
}

ConfigSpace ConfigSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json_text(buffer.str());
  } catch (const DataError& e) {
    throw DataError(path.string(), e.what());
  }
}

std::string ConfigSpace::to_json_text() const {
  nlohmann::ordered_json j;
  j["profile_name"] = profile_name_;
  nlohmann::ordered_json jr = nlohmann::ordered_json::object();
  for (Param p : kAllParams) jr[std::string(spark_property(p))] = {range(p).lo, range(p).hi};
  j["ranges"] = jr;
  return j.dump(2);
}

bool ConfigSpace::contains(const Configuration& c) const {
  for (Param p : kAllParams) {
    if (c[p] < range(p).lo || c[p] > range(p).hi) return false;
  }
  return true;
}

Configuration default_config() { return Configuration{200, 4, 1, 1, 1, 1}; }

Configuration clamp(const Configuration& c, const ConfigSpace& space) {
  Configuration out = c;
  for (Param p : kAllParams) out[p] = std::clamp(c[p], space.range(p).lo, space.range(p).hi);
  return out;
}

std::int64_t round_half_up_div(std::int64_t sum, std::int64_t count) {
  if (count <= 0) throw std::invalid_argument("count must be positive");
  // floor((2*sum + count) / (2*count)) with floor semantics for negatives.
  const std::int64_t num = 2 * sum + count;
  const std::int64_t den = 2 * count;
  std::int64_t q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

Configuration aggregate_mean(std::span<const Configuration> configs, const ConfigSpace& space) {
  if (configs.empty()) throw EmptyList();
  Configuration out;
  const auto n = static_cast<std::int64_t>(configs.size());
  for (Param p : kAllParams) {
    std::int64_t sum = 0;
    for (const auto& c : configs) sum += c[p];
    out[p] = round_half_up_div(sum, n);
  }
  return clamp(out, space);
}

}  // namespace zest
