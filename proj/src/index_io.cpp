#include <openssl/evp.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "zest/errors.hpp"
#include "zest/index.hpp"
#include "zest/json_io.hpp"

namespace zest {

namespace {

constexpr std::string_view kFormatTag = "zest-retrieval-index";

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffU) << 24) | ((v & 0xff00U) << 8) | ((v >> 8) & 0xff00U) | (v >> 24);
  }
}

std::string encode_vector(const std::vector<float>& values) {
  std::string raw(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto word = to_little_endian(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(raw.data() + 4 * i, &word, 4);
  }
  std::string out(4 * ((raw.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(raw.data()), static_cast<int>(raw.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::vector<float> decode_vector(const std::string& b64, std::size_t dimension) {
  if (b64.size() % 4 != 0) throw IoError("embedding payload is not valid base64");
  std::string raw(3 * (b64.size() / 4), '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(raw.data()),
                                reinterpret_cast<const unsigned char*>(b64.data()), static_cast<int>(b64.size()));
  if (n < 0) throw IoError("embedding payload is not valid base64");
  // EVP_DecodeBlock keeps the bytes standing in for '=' padding.
  std::size_t padding = 0;
  if (!b64.empty() && b64.back() == '=') ++padding;
  if (b64.size() >= 2 && b64[b64.size() - 2] == '=') ++padding;
  raw.resize(static_cast<std::size_t>(n) - padding);
  if (raw.size() != dimension * 4) {
    throw IoError("embedding payload holds " + std::to_string(raw.size() / 4) + " values, expected " +
                  std::to_string(dimension));
  }
  std::vector<float> values(dimension);
  for (std::size_t i = 0; i < dimension; ++i) {
    std::uint32_t word = 0;
    std::memcpy(&word, raw.data() + 4 * i, 4);
    values[i] = std::bit_cast<float>(to_little_endian(word));
    if (!std::isfinite(values[i])) throw IoError("embedding payload holds a non-finite value");
  }
  return values;
}

}  // namespace

std::string serialize_index(const RetrievalIndex& index) {
  ordered_json j;
  j["format"] = kFormatTag;
  j["version"] = kIndexFormatVersion;
  j["embedder"] = embedder_spec_to_json(index.embedder_spec());
  j["canonicalize"] = canonicalize_options_to_json(index.canonicalize_options());
  j["space_profile"] = index.space_profile();
  j["entry_count"] = index.size();
  ordered_json entries = ordered_json::array();
  for (const auto& e : index.entries()) {
    ordered_json je;
    je["query_id"] = e.key.query_id;
    je["input_gb"] = e.key.input_gb;
    je["catalog"] = e.catalog;
    je["best_runtime_s"] = e.best_runtime_s;
    je["best_config"] = config_to_json(e.best_config);
    je["model_id"] = e.embedding.model_id;
    je["plan"] = e.plan;
    je["embedding"] = encode_vector(e.embedding.values);
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump(1) + "\n";
}

RetrievalIndex deserialize_index(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("index file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != kFormatTag) {
    throw FormatVersionError("not a retrieval index file");
  }
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw FormatVersionError("index file has no version tag");
  }
  if (const int version = j["version"].get<int>(); version != kIndexFormatVersion) {
    throw FormatVersionError("unsupported index format version " + std::to_string(version));
  }
  try {
    auto spec = embedder_spec_from_json(j.at("embedder"));
    auto canonicalize = canonicalize_options_from_json(j.at("canonicalize"));
    const auto& jentries = j.at("entries");
    if (j.at("entry_count").get<std::size_t>() != jentries.size()) {
      throw IoError("index file is truncated: entry count does not match");
    }
    std::vector<IndexEntry> entries;
    entries.reserve(jentries.size());
    for (const auto& je : jentries) {
      IndexEntry e;
      e.key.query_id = je.at("query_id").get<std::string>();
      e.key.input_gb = je.at("input_gb").get<std::int64_t>();
      e.catalog = je.at("catalog").get<std::string>();
      e.best_runtime_s = je.at("best_runtime_s").get<double>();
      e.best_config = config_from_json(je.at("best_config"));
      e.embedding.model_id = je.at("model_id").get<std::string>();
      e.plan = je.at("plan").get<std::string>();
      e.embedding.values = decode_vector(je.at("embedding").get<std::string>(), spec.dimension);
      entries.push_back(std::move(e));
    }
    return RetrievalIndex(std::move(spec), canonicalize, j.at("space_profile").get<std::string>(),
                          std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed index file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("malformed index file: ") + e.what());
  }
}

void save_index(const RetrievalIndex& index, const std::filesystem::path& path) {
  const auto payload = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write index " + path.string());
  out << payload;
  out.flush();
  if (!out) throw IoError("error writing index " + path.string());
}

RetrievalIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize_index(buffer.str());
}

}  // namespace zest
