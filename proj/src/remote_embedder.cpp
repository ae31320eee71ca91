#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "zest/embed.hpp"
#include "zest/errors.hpp"

namespace zest {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw RemoteError("endpoint must be an http(s) URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class RetryableError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

}  // namespace

RemoteEmbedder::RemoteEmbedder(EmbedderSpec spec, std::size_t cache_capacity)
    : spec_(std::move(spec)), cache_capacity_(cache_capacity) {
  if (spec_.kind != EmbedderKind::remote) throw std::invalid_argument("RemoteEmbedder needs a remote spec");
  spec_.validate();
}

std::size_t RemoteEmbedder::cache_size() const {
  std::lock_guard lock(cache_mutex_);
  return cache_.size();
}

std::vector<float> RemoteEmbedder::fetch(std::string_view text) const {
  const auto endpoint = split_url(spec_.endpoint);
  httplib::Client client(endpoint.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(spec_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(spec_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (const char* key = std::getenv("ZEST_EMBEDDING_API_KEY"); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const nlohmann::json request = {{"model", spec_.model_id}, {"input", nlohmann::json::array({std::string(text)})}};
  const std::string body = request.dump();

  auto attempt = [&]() -> std::vector<float> {
    auto response = client.Post(endpoint.path, headers, body, "application/json");
    if (!response) {
      throw RetryableError("request to " + spec_.endpoint + " failed: " + httplib::to_string(response.error()));
    }
    if (response->status >= 500 || response->status == 429) {
      throw RetryableError("embedding service returned HTTP " + std::to_string(response->status));
    }
    if (response->status != 200) {
      throw RemoteError("embedding service returned HTTP " + std::to_string(response->status));
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(response->body);
    } catch (const nlohmann::json::exception& e) {
      throw RemoteError(std::string("malformed embedding response: ") + e.what());
    }
    if (!parsed.is_object() || !parsed.contains("embeddings") || !parsed["embeddings"].is_array() ||
        parsed["embeddings"].empty() || !parsed["embeddings"][0].is_array()) {
      throw RemoteError("embedding response lacks an \"embeddings\" array");
    }
    const auto& row = parsed["embeddings"][0];
    if (row.size() != spec_.dimension) throw DimensionMismatch(spec_.dimension, row.size());
    std::vector<float> values;
    values.reserve(row.size());
    for (const auto& v : row) {
      if (!v.is_number()) throw RemoteError("embedding response holds a non-numeric entry");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw RemoteError("embedding response holds a non-finite entry");
      values.push_back(static_cast<float>(x));
    }
    l2_normalize(values);
    return values;
  };

  auto backoff = spec_.retry_backoff;
  for (int tries = 0;; ++tries) {
    try {
      return attempt();
    } catch (const RetryableError& e) {
      if (tries >= spec_.retries) throw RemoteError(e.what());
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
  const std::uint64_t key = feature_hash(text, feature_hash(spec_.model_id));
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return {it->second, spec_.model_id};
  }
  auto values = fetch(text);
  if (cache_capacity_ > 0) {
    std::lock_guard lock(cache_mutex_);
    if (cache_.emplace(key, values).second) {
      cache_order_.push_back(key);
      while (cache_order_.size() > cache_capacity_) {
        cache_.erase(cache_order_.front());
        cache_order_.pop_front();
      }
    }
  }
  return {std::move(values), spec_.model_id};
}

}  // namespace zest
