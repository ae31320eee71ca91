#include <gtest/gtest.h>

#include <numeric>

#include "zest/errors.hpp"
#include "zest/eval.hpp"

namespace zest {
namespace {

RetrievalIndex index_with(const std::vector<Configuration>& configs) {
  std::vector<IndexEntry> entries;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    IndexEntry e;
    e.key = {"q" + std::to_string(i), 100};
    e.embedding.model_id = "lexical-hash-ngram";
    e.embedding.values.assign(64, 0.0F);
    e.embedding.values[i % 64] = 1.0F;
    e.best_config = configs[i];
    e.best_runtime_s = 1.0;
    entries.push_back(std::move(e));
  }
  return RetrievalIndex(EmbedderSpec::lexical(64), {}, "emr", std::move(entries));
}

TEST(Accumulated, FixedPolicies) {
  EXPECT_EQ(accumulated_cost({"z", 0, 10, {}}, 3).points.back().accumulated_s, 30);
  EXPECT_EQ(accumulated_cost({"s", 100, 10, {}}, 1).points.back().accumulated_s, 110);
  const auto c = accumulated_cost({"s", 16961, 2254, {}}, 200);
  ASSERT_EQ(c.points.size(), 200u);
  for (std::size_t i = 1; i < c.points.size(); ++i) EXPECT_GT(c.points[i].accumulated_s, c.points[i - 1].accumulated_s);
}

TEST(Accumulated, SchedulePolicies) {
  const auto c = accumulated_cost({"tpe", 0, 5, {40, 30, 20}}, 5);
  std::vector<double> got;
  for (const auto& p : c.points) got.push_back(p.accumulated_s);
  EXPECT_EQ(got, (std::vector<double>{40, 70, 90, 95, 100}));
}

TEST(Accumulated, Validation) {
  EXPECT_THROW(accumulated_cost({"x", -1, 1, {}}, 3), std::invalid_argument);
  EXPECT_THROW(accumulated_cost({"x", 0, 0, {}}, 3), std::invalid_argument);
  EXPECT_THROW(accumulated_cost({"x", 0, 1, {1, 0}}, 3), std::invalid_argument);
  EXPECT_THROW(accumulated_cost({"x", 0, 1, {}}, 0), std::invalid_argument);
}

TEST(Accumulated, PublishedCrossover) {
  const auto zest = accumulated_cost({"zest", 0, 2369, {}}, 400);
  const auto simtune = accumulated_cost({"simtune", 16961, 2254, {}}, 400);
  for (int n = 1; n <= 400; ++n) {
    const double z = zest.points[n - 1].accumulated_s;
    const double s = simtune.points[n - 1].accumulated_s;
    if (n <= 147) {
      EXPECT_LT(z, s) << n;
    } else {
      EXPECT_GT(z, s) << n;
    }
  }
}

TEST(BreakEven, PublishedValues) {
  EXPECT_EQ(break_even(16961, 2254, 2369), 148);
  EXPECT_EQ(break_even(16961, 3488, 2369), std::nullopt);
  EXPECT_EQ(break_even(100, 10, 10), std::nullopt);
  EXPECT_EQ(break_even(0, 1, 2), 1);
}

TEST(BreakEven, ConsistentWithCurves) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 5000.0);
  for (int i = 0; i < 2000; ++i) {
    const double upfront = std::floor(u(rng)) * (i % 3);  // includes zero and integral quotients
    const double zest = std::floor(u(rng));
    const double method = std::floor(u(rng));
    const auto n = break_even(upfront, method, zest);
    if (method >= zest) {
      EXPECT_FALSE(n);
      continue;
    }
    ASSERT_TRUE(n);
    const auto zc = accumulated_cost({"z", 0, zest, {}}, *n);
    const auto mc = accumulated_cost({"m", upfront, method, {}}, *n);
    EXPECT_LT(mc.points[*n - 1].accumulated_s, zc.points[*n - 1].accumulated_s);
    if (*n > 1) EXPECT_GE(mc.points[*n - 2].accumulated_s, zc.points[*n - 2].accumulated_s);
  }
}

TEST(BreakEven, ExactQuotient) {
  // 230 / 115 = 2 exactly: at n = 2 the costs tie, so n = 3.
  EXPECT_EQ(break_even(230, 2254, 2369), 3);
}

TEST(Speedup, PublishedTotals) {
  EXPECT_NEAR(speedup(16961, 2369), 7.159561, 1e-6);
  EXPECT_EQ(speedup(10, 10), 1.0);
  EXPECT_NEAR(speedup(9953, 1364), 7.297, 0.001);
  EXPECT_NEAR(speedup(7008, 1005), 6.973, 0.001);
  EXPECT_THROW(speedup(0, 1), std::invalid_argument);
}

TEST(Speedup, Chains) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 1e5);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    EXPECT_NEAR(speedup(a, b) * speedup(b, c), speedup(a, c), 1e-12 * speedup(a, c));
  }
}

TEST(Retention, PublishedValues) {
  EXPECT_NEAR(improvement_retention(2211, 2369).ratio_direct, 0.9333, 0.0005);
  EXPECT_FALSE(improvement_retention(2211, 2369).ratio_improvement);
  EXPECT_NEAR(*improvement_retention(2254, 2369, 16961).ratio_improvement, 0.9922, 0.00005);
  const auto same = improvement_retention(50, 50, 400);
  EXPECT_EQ(same.ratio_direct, 1.0);
  EXPECT_EQ(same.ratio_improvement, 1.0);
}

TEST(Histograms, IdenticalConfigs) {
  const auto idx = index_with(std::vector<Configuration>(5, Configuration{300, 4, 8, 2, 16, 7}));
  for (const auto& h : param_histograms(idx, ConfigSpace::emr(), 10)) {
    int occupied = 0;
    for (const auto& b : h.bins) occupied += b.count > 0;
    EXPECT_EQ(occupied, 1);
  }
}

TEST(Histograms, CountsSumAndBinning) {
  std::mt19937_64 rng(4);
  std::vector<Configuration> cs;
  for (int i = 0; i < 64; ++i) cs.push_back(random_sample(ConfigSpace::emr(), rng));
  const auto idx = index_with(cs);
  const auto hs = param_histograms(idx, ConfigSpace::emr(), 7);
  ASSERT_EQ(hs.size(), 6u);
  for (const auto& h : hs) {
    std::size_t total = 0;
    for (const auto& b : h.bins) total += b.count;
    EXPECT_EQ(total, 64u);
    EXPECT_EQ(h.bins.front().lo, static_cast<double>(ConfigSpace::emr().range(h.param).lo));
    EXPECT_EQ(h.bins.back().hi, static_cast<double>(ConfigSpace::emr().range(h.param).hi + 1));
  }
  // Executor cores 1..7 over 7 bins: one value per bin.
  const auto& cores = hs[5];
  for (int v = 1; v <= 7; ++v) {
    const auto expect = std::count_if(cs.begin(), cs.end(), [&](const Configuration& c) { return c.executor_cores == v; });
    EXPECT_EQ(cores.bins[v - 1].count, static_cast<std::size_t>(expect));
  }
  EXPECT_THROW(param_histograms(idx, ConfigSpace::emr(), 0), std::invalid_argument);
  EXPECT_THROW(param_histograms(index_with({}), ConfigSpace::emr(), 3), EmptyIndex);
}

TEST(Tables, CsvSchemas) {
  const auto idx = index_with({Configuration{300, 4, 8, 2, 16, 7}});
  const auto hs = param_histograms(idx, ConfigSpace::emr(), 2);
  const auto csv = histograms_csv(hs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "param,bin_lo,bin_hi,count");
  EXPECT_NE(csv.find("spark.sql.shuffle.partitions,50,525.5,1\n"), std::string::npos);
  EXPECT_EQ(histograms_json(hs)["spark.executor.cores"][1]["count"], 1);

  const std::vector<TotalRow> totals{{"zest", "tpcds", 2369}, {"default", "tpcds", 16961.5}};
  EXPECT_EQ(totals_csv(totals), "policy,dataset,total_s\nzest,tpcds,2369\ndefault,tpcds,16961.5\n");
  const std::vector<BreakEvenRow> be{{"simtune", 148}, {"yoro", std::nullopt}};
  EXPECT_EQ(break_even_csv(be), "policy,n_or_never\nsimtune,148\nyoro,never\n");
  const std::vector<CostCurve> curves{accumulated_cost({"a", 0, 1.5, {}}, 2), accumulated_cost({"b", 3, 1, {}}, 2)};
  EXPECT_EQ(curves_csv(curves), "n,a,b\n1,1.5,4\n2,3,5\n");
  EXPECT_EQ(to_json(curves[0])["points"][1]["accumulated_s"], 3.0);
}

}  // namespace
}  // namespace zest
