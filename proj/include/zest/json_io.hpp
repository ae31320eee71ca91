#pragma once

// JSON conversions shared by the file formats and the CLI. Configurations
// are keyed by Spark property name.

#include <string>

#include <json.hpp>

#include "zest/embed.hpp"
#include "zest/plan.hpp"
#include "zest/space.hpp"

namespace zest {

using ordered_json = nlohmann::ordered_json;

ordered_json config_to_json(const Configuration& c);

/// Accepts integers, integral floats, and for memory parameters Spark size
/// strings such as "4g" or "2048m". Missing parameters keep Spark defaults.
/// Throws std::invalid_argument on bad values or unknown keys.
Configuration config_from_json(const nlohmann::json& j);

/// Spark size string ("4g", "512m", "1t", or a bare number of bytes when
/// `bare_is_bytes`) to whole gigabytes, rounding half-up, at least 1.
std::int64_t parse_memory_gb(const std::string& text, bool bare_is_bytes = false);

ordered_json embedder_spec_to_json(const EmbedderSpec& spec);
EmbedderSpec embedder_spec_from_json(const nlohmann::json& j);

ordered_json canonicalize_options_to_json(const CanonicalizeOptions& opts);
CanonicalizeOptions canonicalize_options_from_json(const nlohmann::json& j);

}  // namespace zest
