#include "zest/records.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "zest/errors.hpp"
#include "zest/json_io.hpp"

namespace zest {

namespace {

const std::string& source_name(const FieldMapping* mapping, const std::string& field) {
  if (mapping != nullptr) {
    if (auto it = mapping->fields.find(field); it != mapping->fields.end()) return it->second;
  }
  return field;
}

const nlohmann::json* lookup(const nlohmann::json& row, const std::string& name) {
  auto it = row.find(name);
  if (it == row.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string string_field(const nlohmann::json& row, const std::string& name, bool required) {
  const auto* v = lookup(row, name);
  if (v == nullptr) {
    if (required) throw std::invalid_argument("missing field \"" + name + "\"");
    return {};
  }
  if (!v->is_string()) throw std::invalid_argument("field \"" + name + "\" must be a string");
  return v->get<std::string>();
}

std::int64_t size_field(const nlohmann::json& row, const std::string& name) {
  const auto* v = lookup(row, name);
  if (v == nullptr) throw std::invalid_argument("missing field \"" + name + "\"");
  if (v->is_number_integer()) return v->get<std::int64_t>();
  if (v->is_number_float()) {
    const double d = v->get<double>();
    if (d != std::floor(d)) throw std::invalid_argument("field \"" + name + "\" must be a whole number of GB");
    return static_cast<std::int64_t>(d);
  }
  if (v->is_string()) return parse_memory_gb(v->get<std::string>());
  throw std::invalid_argument("field \"" + name + "\" must be a number");
}

ExecutionRecord record_from_json(const nlohmann::json& row, const FieldMapping* mapping, bool& failed) {
  if (!row.is_object()) throw std::invalid_argument("record must be a JSON object");
  ExecutionRecord r;
  r.query_id = string_field(row, source_name(mapping, "query_id"), true);
  r.catalog = string_field(row, source_name(mapping, "catalog"), false);
  r.input_gb = size_field(row, source_name(mapping, "input_gb"));
  r.logical_plan = string_field(row, source_name(mapping, "logical_plan"), true);
  r.cluster_profile = string_field(row, source_name(mapping, "cluster_profile"), false);

  if (mapping != nullptr && !mapping->config.empty()) {
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [property, column] : mapping->config) {
      if (const auto* v = lookup(row, column)) cfg[property] = *v;
    }
    r.config = config_from_json(cfg);
  } else if (const auto* cfg = lookup(row, source_name(mapping, "config"))) {
    r.config = config_from_json(*cfg);
  } else {
    throw std::invalid_argument("missing field \"config\"");
  }

  if (mapping != nullptr && mapping->metrics_prefix) {
    const auto& prefix = *mapping->metrics_prefix;
    for (const auto& [key, value] : row.items()) {
      if (key.rfind(prefix, 0) == 0 && value.is_number()) r.metrics[key.substr(prefix.size())] = value.get<double>();
    }
  } else if (const auto* metrics = lookup(row, source_name(mapping, "metrics"))) {
    if (!metrics->is_object()) throw std::invalid_argument("field \"metrics\" must be an object");
    for (const auto& [key, value] : metrics->items()) {
      if (!value.is_number()) throw std::invalid_argument("metric \"" + key + "\" must be a number");
      r.metrics[key] = value.get<double>();
    }
  }

  const auto* runtime = lookup(row, source_name(mapping, "runtime_s"));
  const auto* status = lookup(row, "status");
  failed = runtime == nullptr || (status != nullptr && status->is_string() && status->get<std::string>() == "failure");
  if (!failed) {
    if (!runtime->is_number()) throw std::invalid_argument("field \"runtime_s\" must be a number");
    r.runtime_s = runtime->get<double>();
  }
  return r;
}

}  // namespace

FieldMapping FieldMapping::from_json_text(const std::string& text) {
  FieldMapping m;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("field mapping", e.what());
  }
  if (!j.is_object()) throw DataError("field mapping", "must be a JSON object");
  try {
    if (j.contains("fields")) m.fields = j["fields"].get<std::map<std::string, std::string>>();
    if (j.contains("config")) m.config = j["config"].get<std::map<std::string, std::string>>();
    if (j.contains("metrics_prefix")) m.metrics_prefix = j["metrics_prefix"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("field mapping", e.what());
  }
  for (const auto& [property, column] : m.config) {
    if (!param_from_spark_property(property)) {
      throw DataError("field mapping", "unknown configuration parameter \"" + property + "\"");
    }
  }
  return m;
}

FieldMapping FieldMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field mapping " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void validate(const ExecutionRecord& record, const std::string& where) {
  if (record.query_id.empty()) throw DataError(where, "query_id must not be empty");
  if (record.input_gb <= 0) throw DataError(where, "input_gb must be positive");
  if (!(record.runtime_s > 0.0) || !std::isfinite(record.runtime_s)) {
    throw DataError(where, "runtime_s must be positive and finite");
  }
}

IngestResult read_records(std::istream& in, const std::string& source, const FieldMapping* mapping) {
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    bool failed = false;
    ExecutionRecord record;
    try {
      record = record_from_json(nlohmann::json::parse(line), mapping, failed);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where, e.what());
    } catch (const std::invalid_argument& e) {
      throw DataError(where, e.what());
    } catch (const std::out_of_range& e) {
      throw DataError(where, e.what());
    }
    if (failed) {
      ++result.skipped_failed;
      continue;
    }
    validate(record, where);
    result.records.push_back(std::move(record));
  }
  return result;
}

IngestResult read_records(const std::filesystem::path& path, const FieldMapping* mapping) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records file " + path.string());
  return read_records(in, path.string(), mapping);
}

std::string to_json_line(const ExecutionRecord& record) {
  ordered_json j;
  j["query_id"] = record.query_id;
  j["catalog"] = record.catalog;
  j["input_gb"] = record.input_gb;
  j["logical_plan"] = record.logical_plan;
  j["config"] = config_to_json(record.config);
  j["runtime_s"] = record.runtime_s;
  j["cluster_profile"] = record.cluster_profile;
  if (!record.metrics.empty()) j["metrics"] = record.metrics;
  return j.dump();
}

void write_records(std::ostream& out, const std::vector<ExecutionRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

void write_records(const std::filesystem::path& path, const std::vector<ExecutionRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_records(out, records);
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace zest
