#include "zest/json_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace zest {

namespace {

bool is_memory_param(Param p) { return p == Param::driver_memory_gb || p == Param::executor_memory_gb; }

std::int64_t integral_value(const nlohmann::json& v, Param p) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d) || d != std::floor(d)) {
      throw std::invalid_argument(std::string(spark_property(p)) + " must be an integer");
    }
    return static_cast<std::int64_t>(d);
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (is_memory_param(p)) return parse_memory_gb(s);
    std::size_t used = 0;
    const long long parsed = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(std::string(spark_property(p)) + ": not an integer: " + s);
    return parsed;
  }
  throw std::invalid_argument(std::string(spark_property(p)) + " must be a number");
}

}  // namespace

ordered_json config_to_json(const Configuration& c) {
  ordered_json j = ordered_json::object();
  for (Param p : kAllParams) j[std::string(spark_property(p))] = c[p];
  return j;
}

Configuration config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
  Configuration c = default_config();
  for (const auto& [key, value] : j.items()) {
    auto p = param_from_spark_property(key);
    if (!p) throw std::invalid_argument("unknown configuration parameter \"" + key + "\"");
    c[*p] = integral_value(value, *p);
  }
  return c;
}

std::int64_t parse_memory_gb(const std::string& text, bool bare_is_bytes) {
  std::size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
  if (i == 0) throw std::invalid_argument("bad memory size \"" + text + "\"");
  const double amount = std::stod(text.substr(0, i));
  std::string unit = text.substr(i);
  for (auto& ch : unit) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (!unit.empty() && unit.back() == 'b' && unit.size() == 2) unit.pop_back();
  double gb = 0.0;
  if (unit.empty()) {
    gb = bare_is_bytes ? amount / (1024.0 * 1024.0 * 1024.0) : amount;
  } else if (unit == "k") {
    gb = amount / (1024.0 * 1024.0);
  } else if (unit == "m") {
    gb = amount / 1024.0;
  } else if (unit == "g") {
    gb = amount;
  } else if (unit == "t") {
    gb = amount * 1024.0;
  } else {
    throw std::invalid_argument("bad memory unit in \"" + text + "\"");
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(gb + 0.5)));
}

ordered_json embedder_spec_to_json(const EmbedderSpec& spec) {
  ordered_json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["model_id"] = spec.model_id;
  j["dimension"] = spec.dimension;
  if (spec.kind == EmbedderKind::lexical) {
    j["ngram_range"] = {spec.ngram_lo, spec.ngram_hi};
  } else {
    j["endpoint"] = spec.endpoint;
  }
  return j;
}

EmbedderSpec embedder_spec_from_json(const nlohmann::json& j) {
  EmbedderSpec spec;
  spec.kind = embedder_kind_from_string(j.at("kind").get<std::string>());
  spec.model_id = j.at("model_id").get<std::string>();
  spec.dimension = j.at("dimension").get<std::size_t>();
  if (spec.kind == EmbedderKind::lexical) {
    const auto& range = j.at("ngram_range");
    spec.ngram_lo = range.at(0).get<int>();
    spec.ngram_hi = range.at(1).get<int>();
  } else {
    spec.endpoint = j.at("endpoint").get<std::string>();
  }
  spec.validate();
  return spec;
}

ordered_json canonicalize_options_to_json(const CanonicalizeOptions& opts) {
  ordered_json j;
  j["strip_node_ids"] = opts.strip_node_ids;
  j["strip_literals"] = opts.strip_literals;
  j["collapse_whitespace"] = opts.collapse_whitespace;
  return j;
}

CanonicalizeOptions canonicalize_options_from_json(const nlohmann::json& j) {
  CanonicalizeOptions opts;
  opts.strip_node_ids = j.value("strip_node_ids", opts.strip_node_ids);
  opts.strip_literals = j.value("strip_literals", opts.strip_literals);
  opts.collapse_whitespace = j.value("collapse_whitespace", opts.collapse_whitespace);
  return opts;
}

}  // namespace zest
