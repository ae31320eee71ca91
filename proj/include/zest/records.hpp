#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zest/space.hpp"

namespace zest {

/// One execution of a query under one configuration.
struct ExecutionRecord {
  std::string query_id;
  std::string catalog;
  std::int64_t input_gb = 0;
  std::string logical_plan;
  Configuration config;
  double runtime_s = 0.0;
  std::string cluster_profile;
  std::map<std::string, double> metrics;

  bool operator==(const ExecutionRecord&) const = default;
};

/// Renames source columns onto ExecutionRecord fields, for datasets whose
/// layout differs from ours. Loaded from JSON:
///
///   {"fields": {"query_id": "query", "input_gb": "size", "runtime_s": "duration", ...},
///    "config": {"spark.executor.memory": "exec_mem", ...},
///    "metrics_prefix": "metric_"}
///
/// Unmapped fields keep their own names. Memory values may be numbers of GB
/// or Spark size strings ("4g", "512m").
struct FieldMapping {
  std::map<std::string, std::string> fields;
  std::map<std::string, std::string> config;
  std::optional<std::string> metrics_prefix;

  static FieldMapping load(const std::filesystem::path& path);
  static FieldMapping from_json_text(const std::string& text);
};

struct IngestResult {
  std::vector<ExecutionRecord> records;
  /// Lines describing failed executions (no runtime), excluded from records.
  std::size_t skipped_failed = 0;
};

/// Reads JSON Lines, one record per line; blank lines are ignored. Throws
/// DataError naming `source:line` for malformed or invalid lines.
IngestResult read_records(std::istream& in, const std::string& source = "<stream>",
                          const FieldMapping* mapping = nullptr);
IngestResult read_records(const std::filesystem::path& path, const FieldMapping* mapping = nullptr);

void write_records(std::ostream& out, const std::vector<ExecutionRecord>& records);
void write_records(const std::filesystem::path& path, const std::vector<ExecutionRecord>& records);

std::string to_json_line(const ExecutionRecord& record);

/// Throws DataError unless runtime_s > 0, input_gb > 0 and query_id is set.
void validate(const ExecutionRecord& record, const std::string& where = {});

}  // namespace zest
