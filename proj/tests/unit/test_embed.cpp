#include <gtest/gtest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "zest/embed.hpp"
#include "zest/errors.hpp"
#include "zest/plan.hpp"

namespace zest {
namespace {

// FNV-1a followed by the splitmix64 finalizer, written out again for the oracle.
std::uint64_t oracle_hash(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL ^ 0x9e3779b97f4a7c15ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

std::vector<std::string> grams(const std::vector<std::string>& tokens, int lo, int hi) {
  std::vector<std::string> out;
  for (int n = lo; n <= hi; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string g = tokens[i];
      for (int j = 1; j < n; ++j) g += '\x1f' + tokens[i + j];
      out.push_back(g);
    }
  }
  return out;
}

TEST(Lexical, Deterministic) {
  const auto spec = EmbedderSpec::lexical();
  EXPECT_EQ(embed(spec, "a b").values, embed(spec, "a b").values);
}

TEST(Lexical, EmptyTextIsZeroVector) {
  const auto v = embed(EmbedderSpec::lexical(), "");
  ASSERT_EQ(v.dimension(), 4096u);
  for (float x : v.values) EXPECT_EQ(x, 0.0F);
}

TEST(Lexical, UnitNormAndDimension) {
  for (std::size_t d : {64u, 512u, 4096u}) {
    const auto v = embed(EmbedderSpec::lexical(d), "Join Inner ( a = b ) Relation t");
    EXPECT_EQ(v.dimension(), d);
    EXPECT_NEAR(v.norm(), 1.0, 1e-6);
  }
}

TEST(Lexical, MatchesHandBuiltCountVector) {
  const std::string text = "Filter ( a > 5 ) Relation t Filter ( a > 5 )";
  const auto tokens = tokenize(text);
  std::vector<double> counts(4096, 0.0);
  for (const auto& g : grams(tokens, 1, 3)) counts[oracle_hash(g) % 4096] += 1.0;
  double norm = 0.0;
  for (double c : counts) norm += c * c;
  norm = std::sqrt(norm);
  const auto v = embed(EmbedderSpec::lexical(), text);
  for (std::size_t i = 0; i < counts.size(); ++i) EXPECT_NEAR(v.values[i], counts[i] / norm, 1e-6);
}

TEST(Lexical, DisjointTextsAreOrthogonal) {
  const std::string a = "alpha beta gamma delta epsilon";
  const std::string b = "zeta eta theta iota kappa";
  std::set<std::uint64_t> ba, bb;
  for (const auto& g : grams(tokenize(a), 1, 3)) ba.insert(oracle_hash(g) % 4096);
  for (const auto& g : grams(tokenize(b), 1, 3)) bb.insert(oracle_hash(g) % 4096);
  bool collide = false;
  for (auto x : ba) collide |= bb.count(x) > 0;
  const double sim = cosine(embed(EmbedderSpec::lexical(), a), embed(EmbedderSpec::lexical(), b));
  if (!collide) EXPECT_EQ(sim, 0.0);
  EXPECT_LT(sim, 0.05);
}

TEST(Lexical, NgramRangeMatters) {
  const auto uni = EmbedderSpec::lexical(4096, 1, 1);
  // Same bag of words, different order: identical under unigrams only.
  EXPECT_NEAR(cosine(embed(uni, "a b c"), embed(uni, "c b a")), 1.0, 1e-9);
  EXPECT_LT(cosine(embed(EmbedderSpec::lexical(), "a b c"), embed(EmbedderSpec::lexical(), "c b a")), 0.99);
}

TEST(Spec, Validation) {
  EXPECT_THROW(EmbedderSpec::lexical(32), std::invalid_argument);
  EXPECT_THROW(EmbedderSpec::lexical(4096, 0, 2), std::invalid_argument);
  EXPECT_THROW(EmbedderSpec::lexical(4096, 3, 2), std::invalid_argument);
  EXPECT_THROW(EmbedderSpec::lexical(4096, 1, 6), std::invalid_argument);
  EXPECT_THROW(EmbedderSpec::remote("", "m", 128), std::invalid_argument);
}

TEST(Spec, Compatibility) {
  EXPECT_TRUE(compatible(EmbedderSpec::lexical(), EmbedderSpec::lexical()));
  EXPECT_FALSE(compatible(EmbedderSpec::lexical(4096), EmbedderSpec::lexical(2048)));
  EXPECT_FALSE(compatible(EmbedderSpec::lexical(4096, 1, 3), EmbedderSpec::lexical(4096, 1, 2)));
  EXPECT_FALSE(compatible(EmbedderSpec::lexical(128), EmbedderSpec::remote("http://x", "lexical-hash-ngram", 128)));
}

TEST(Cosine, HandValues) {
  const std::vector<float> v{0.3F, -1.5F, 2.0F};
  EXPECT_NEAR(cosine(v, v), 1.0, 1e-9);
  EXPECT_EQ(cosine(std::vector<float>{1, 0}, std::vector<float>{0, 1}), 0.0);
  EXPECT_NEAR(cosine(std::vector<float>{1, 2, 3}, std::vector<float>{4, 5, 6}), 32.0 / std::sqrt(14.0 * 77.0), 1e-9);
  EXPECT_NEAR(cosine(std::vector<float>{1, 2, 3}, std::vector<float>{4, 5, 6}), 0.974631846, 1e-9);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine(std::vector<float>{1, 2}, std::vector<float>{1, 2, 3}), DimensionMismatch);
  EXPECT_THROW(cosine(std::vector<float>{0, 0}, std::vector<float>{1, 2}), ZeroVector);
}

class FakeService {
 public:
  explicit FakeService(std::size_t dim, int fail_first = 0) : dim_(dim), fail_first_(fail_first) {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls_;
      if (calls_ <= fail_first_) {
        res.status = 503;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      last_auth_ = req.get_header_value("Authorization");
      const std::string text = body["input"][0];
      std::vector<double> row(dim_, 0.0);
      for (std::size_t i = 0; i < text.size(); ++i) row[i % dim_] += static_cast<unsigned char>(text[i]);
      res.set_content(nlohmann::json{{"embeddings", {row}}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }
  int calls() const { return calls_; }
  const std::string& last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::size_t dim_;
  int fail_first_;
  std::atomic<int> calls_{0};
  std::string last_auth_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Remote, FetchesNormalizesAndCaches) {
  FakeService service(64);
  auto spec = EmbedderSpec::remote(service.url(), "fake-model", 64);
  RemoteEmbedder embedder(spec);
  const auto a = embedder.embed("Join a b");
  EXPECT_EQ(a.dimension(), 64u);
  EXPECT_NEAR(a.norm(), 1.0, 1e-6);
  EXPECT_EQ(a.model_id, "fake-model");
  const auto b = embedder.embed("Join a b");
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(service.calls(), 1);
  EXPECT_EQ(embedder.cache_size(), 1u);
}

TEST(Remote, RetriesServerErrors) {
  FakeService service(64, 2);
  auto spec = EmbedderSpec::remote(service.url(), "fake-model", 64);
  spec.retry_backoff = std::chrono::milliseconds(1);
  EXPECT_NO_THROW(RemoteEmbedder(spec).embed("x"));
  EXPECT_EQ(service.calls(), 3);
}

TEST(Remote, GivesUpAfterRetries) {
  FakeService service(64, 100);
  auto spec = EmbedderSpec::remote(service.url(), "fake-model", 64);
  spec.retries = 1;
  spec.retry_backoff = std::chrono::milliseconds(1);
  EXPECT_THROW(RemoteEmbedder(spec).embed("x"), RemoteError);
  EXPECT_EQ(service.calls(), 2);
}

TEST(Remote, DimensionMismatch) {
  FakeService service(32);
  EXPECT_THROW(RemoteEmbedder(EmbedderSpec::remote(service.url(), "fake-model", 64)).embed("x"), DimensionMismatch);
}

TEST(Remote, UnreachableEndpoint) {
  auto spec = EmbedderSpec::remote("http://127.0.0.1:1/embed", "m", 64);
  spec.retries = 0;
  spec.timeout = std::chrono::milliseconds(500);
  EXPECT_THROW(RemoteEmbedder(spec).embed("x"), RemoteError);
}

}  // namespace
}  // namespace zest
