#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "zest/embed.hpp"
#include "zest/errors.hpp"
#include "zest/oracle.hpp"
#include "zest/plan.hpp"

namespace zest {
namespace {

WorkloadSpec workload(double gb, double ci, double sf, double mem, double dl) {
  WorkloadSpec w;
  w.workload_id = "w";
  w.family_id = "f";
  w.catalog = "tpch";
  w.input_gb = gb;
  w.compute_intensity = ci;
  w.shuffle_fraction = sf;
  w.mem_per_task_gb = mem;
  w.driver_load = dl;
  w.plan_text = "Relation t";
  return w;
}

const ClusterSpec kEmr = ClusterSpec::emr_like();

TEST(Simulator, HandEvaluatedNoSpill) {
  // W = 8, compute = 2*100/8 = 25; b = 50/200 = 0.25 <= 4/2*0.6 = 1.2;
  // shuffle = 50*0.5/8 + 200*0.02/8 = 3.625; driver = 2*200/(1*1) = 400.
  const auto r = simulate_breakdown(workload(100, 2, 0.5, 1, 2), {200, 4, 1, 1, 4, 2}, kEmr);
  ASSERT_TRUE(r);
  EXPECT_DOUBLE_EQ(r->compute_s, 25.0);
  EXPECT_DOUBLE_EQ(r->spill_multiplier, 1.0);
  EXPECT_DOUBLE_EQ(r->shuffle_s, 3.625);
  EXPECT_DOUBLE_EQ(r->driver_s, 400.0);
  EXPECT_NEAR(r->total_s, 428.625, 428.625 * 1e-12);
}

TEST(Simulator, HandEvaluatedWithSpill) {
  // W = 8, compute = 62.5; b = 500/50 = 10, bound = 2/4*0.6 = 0.3,
  // m = 1 + 2*(10/0.3 - 1) = 197/3; shuffle = 500*0.5*(197/3)/8 + 50*0.02/8;
  // driver = 0.5*50/(2*0.5) = 25.
  const auto r = simulate_breakdown(workload(500, 1, 1, 1, 0.5), {50, 2, 4, 2, 2, 4}, kEmr);
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->spill_multiplier, 197.0 / 3.0, 1e-12);
  EXPECT_NEAR(r->shuffle_s, 250.0 * 197.0 / 3.0 / 8.0 + 0.125, 1e-9);
  EXPECT_NEAR(r->driver_s, 25.0, 1e-12);
  EXPECT_NEAR(r->total_s, 62.5 + 250.0 * 197.0 / 24.0 + 0.125 + 25.0, 1e-9);
}

TEST(Simulator, OverCommitBoundaryIsExact) {
  const auto w = workload(100, 1, 0.5, 1, 1);
  EXPECT_TRUE(simulate_runtime(w, {200, 8, 4, 1, 30, 5}, kEmr).ok());     // 40 cores, 244 GB
  EXPECT_FALSE(simulate_runtime(w, {200, 9, 4, 1, 30, 5}, kEmr).ok());    // 45 cores
  EXPECT_TRUE(simulate_runtime(w, {200, 6, 30, 1, 45, 1}, kEmr).ok());    // exactly 300 GB
  EXPECT_FALSE(simulate_runtime(w, {200, 6, 31, 1, 45, 1}, kEmr).ok());   // 301 GB
  EXPECT_FALSE(simulate_runtime(w, {200, 80, 1, 1, 1, 5}, kEmr).ok());    // 400 cores
  EXPECT_TRUE(over_committed({200, 41, 1, 1, 1, 1}, kEmr));
  EXPECT_FALSE(over_committed({200, 40, 1, 1, 1, 1}, kEmr));
}

TEST(Simulator, Deterministic) {
  const auto w = workload(250, 1.5, 0.4, 1, 3);
  const Configuration c{300, 5, 4, 2, 8, 4};
  EXPECT_EQ(simulate_runtime(w, c, kEmr).runtime_s, simulate_runtime(w, c, kEmr).runtime_s);
  const auto a = simulate_runtime(w, c, kEmr, 7).runtime_s;
  EXPECT_EQ(a, simulate_runtime(w, c, kEmr, 7).runtime_s);
  EXPECT_NE(a, simulate_runtime(w, c, kEmr, 8).runtime_s);
  EXPECT_NE(a, simulate_runtime(w, c, kEmr).runtime_s);
  EXPECT_NEAR(a / simulate_runtime(w, c, kEmr).runtime_s, 1.0, 0.5);
}

TEST(Simulator, MonotoneWithoutSpill) {
  const auto w = workload(100, 2, 0.3, 1, 2);
  for (std::int64_t p : {50, 200, 800}) {
    for (std::int64_t i = 1; i < 5; ++i) {
      for (std::int64_t ec = 1; ec < 4; ++ec) {
        const Configuration base{p, i, 4, 1, 20, ec};
        const auto r = simulate_breakdown(w, base, kEmr);
        ASSERT_TRUE(r);
        if (r->spill_multiplier != 1.0) continue;
        auto more_i = base;
        ++more_i.executor_instances;
        auto more_c = base;
        ++more_c.executor_cores;
        for (const auto& c : {more_i, more_c}) {
          const auto s = simulate_breakdown(w, c, kEmr);
          ASSERT_TRUE(s);
          if (s->spill_multiplier != 1.0) continue;
          EXPECT_LT(s->compute_s, r->compute_s);
          EXPECT_LT(s->total_s, r->total_s);
        }
        auto more_dc = base;
        ++more_dc.driver_cores;
        EXPECT_LT(simulate_breakdown(w, more_dc, kEmr)->driver_s, r->driver_s);
      }
    }
  }
}

TEST(Simulator, DoublingWorkersHalvesCompute) {
  const auto w = workload(100, 2, 0.1, 1, 1);
  const auto a = simulate_breakdown(w, {100, 2, 4, 1, 8, 2}, kEmr);
  const auto b = simulate_breakdown(w, {100, 4, 4, 1, 8, 2}, kEmr);
  EXPECT_DOUBLE_EQ(b->compute_s * 2, a->compute_s);
  EXPECT_LT(b->total_s, a->total_s);
}

TEST(Simulator, RejectsBadInput) {
  EXPECT_THROW(simulate_runtime(workload(0, 1, 0.5, 1, 1), default_config(), kEmr), InvalidWorkload);
  EXPECT_THROW(simulate_runtime(workload(10, 1, 1.5, 1, 1), default_config(), kEmr), InvalidWorkload);
  EXPECT_THROW(simulate_runtime(workload(10, 1, 0.5, 1, 1), {0, 1, 1, 1, 1, 1}, kEmr), std::invalid_argument);
}

TEST(Simulator, InteriorOptimalPartitions) {
  const std::vector<double> sizes{100, 250, 500, 750};
  const auto suite = generate_suite(5, 4, sizes, 0);
  int interior = 0;
  for (const auto& w : suite) {
    std::int64_t best_p = 0;
    double best = 1e300;
    for (std::int64_t p = 50; p <= 1000; ++p) {
      const double t = simulate_runtime(w, {p, 8, 44, 7, 32, 5}, kEmr).runtime_s;
      if (t < best) best = t, best_p = p;
    }
    interior += best_p > 50 && best_p < 1000;
  }
  EXPECT_GE(2 * interior, static_cast<int>(suite.size()));
}

TEST(Constants, ParseAndOverride) {
  std::istringstream in("# sensitivity run\nspill_slope = 3\nkappa_net=0.25  # per GB\n\n");
  const auto k = SimulatorConstants::parse(in);
  EXPECT_EQ(k.spill_slope, 3.0);
  EXPECT_EQ(k.kappa_net, 0.25);
  EXPECT_EQ(k.memory_headroom, 0.6);
  const auto w = workload(100, 1, 1, 1, 1);
  const Configuration c{200, 4, 2, 1, 4, 2};
  EXPECT_LT(simulate_runtime(w, c, kEmr, std::nullopt, k).runtime_s, simulate_runtime(w, c, kEmr).runtime_s);
  std::istringstream bad("bogus = 1\n");
  EXPECT_THROW(SimulatorConstants::parse(bad, "k.conf"), DataError);
  std::istringstream nan("spill_slope = fast\n");
  EXPECT_THROW(SimulatorConstants::parse(nan, "k.conf"), DataError);
}

TEST(Replay, ExactMatchOnly) {
  ExecutionRecord r;
  r.query_id = "q";
  r.input_gb = 100;
  r.config = {300, 2, 2, 2, 2, 2};
  r.runtime_s = 42;
  auto dup = r;
  dup.runtime_s = 40;
  const std::vector<ExecutionRecord> rs{r, dup};
  const ReplayEvaluator ev(std::span<const ExecutionRecord>(rs.data(), 1));
  EXPECT_EQ(ev.evaluate({"q", 100}, r.config).runtime_s, 42);
  auto other = r.config;
  other.shuffle_partitions = 301;
  EXPECT_EQ(ev.evaluate({"q", 100}, other).status, Evaluation::Status::not_recorded);
  EXPECT_EQ(ev.evaluate({"q", 250}, r.config).status, Evaluation::Status::not_recorded);
  EXPECT_EQ(ReplayEvaluator(rs).evaluate({"q", 100}, r.config).runtime_s, 40);
  EXPECT_EQ(replay_evaluate(rs, {"q", 100}, r.config).runtime_s, 40);
  EXPECT_FALSE(replay_evaluate(rs, {"q", 100}, other).ok());
}

TEST(Suite, TwoMembersShareOneFamily) {
  const std::vector<double> sizes{100};
  const auto suite = generate_suite(1, 2, sizes, 3);
  ASSERT_EQ(suite.size(), 2u);
  EXPECT_EQ(suite[0].family_id, suite[1].family_id);
  EXPECT_NE(suite[0].workload_id, suite[1].workload_id);
  auto a = tokenize(canonicalize(parse_plan(suite[0].plan_text)));
  auto b = tokenize(canonicalize(parse_plan(suite[1].plan_text)));
  std::multiset<std::string> ma(a.begin(), a.end()), mb(b.begin(), b.end());
  std::size_t shared = 0;
  for (const auto& t : std::set<std::string>(a.begin(), a.end())) shared += std::min(ma.count(t), mb.count(t));
  EXPECT_GE(static_cast<double>(shared), 0.9 * static_cast<double>(std::max(a.size(), b.size())));
}

TEST(Suite, DeterministicAndWellFormed) {
  const std::vector<double> sizes{100, 250, 500, 750};
  const auto a = generate_suite(5, 4, sizes, 0);
  EXPECT_EQ(a, generate_suite(5, 4, sizes, 0));
  EXPECT_NE(a, generate_suite(5, 4, sizes, 1));
  ASSERT_EQ(a.size(), 80u);
  std::set<IndexKey> keys;
  for (const auto& w : a) {
    EXPECT_NO_THROW(w.validate());
    EXPECT_NO_THROW(parse_plan(w.plan_text));
    keys.insert(w.key());
    const std::string db = "_sf" + std::to_string(std::llround(w.input_gb));
    EXPECT_NE(w.plan_text.find(db), std::string::npos);
  }
  EXPECT_EQ(keys.size(), 80u);
}

TEST(Suite, FamiliesSeparateUnderLexicalEmbedder) {
  const std::vector<double> sizes{100, 250, 500, 750};
  const auto suite = generate_suite(5, 4, sizes, 0);
  const auto spec = EmbedderSpec::lexical();
  std::vector<EmbeddingVector> vs;
  for (const auto& w : suite) vs.push_back(embed(spec, canonicalize(parse_plan(w.plan_text))));
  double within = 0, across = 0;
  int nw = 0, na = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    for (std::size_t j = i + 1; j < suite.size(); ++j) {
      const double s = cosine(vs[i], vs[j]);
      if (suite[i].family_id == suite[j].family_id) {
        within += s, ++nw;
      } else {
        across += s, ++na;
      }
    }
  }
  EXPECT_GE(within / nw - across / na, 0.15);
}

TEST(Suite, FileRoundTripAndErrors) {
  test::TempDir dir;
  const std::vector<double> sizes{100, 500};
  const auto suite = generate_suite(2, 2, sizes, 9);
  write_suite(dir / "s.jsonl", suite);
  EXPECT_EQ(read_suite(dir / "s.jsonl"), suite);
  std::istringstream bad("{\"workload_id\": \"x\"}\n");
  try {
    read_suite(bad, "s.jsonl");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.where(), "s.jsonl:1");
  }
}

TEST(Evaluator, SimulatorLookup) {
  const std::vector<double> sizes{100};
  const auto suite = generate_suite(1, 1, sizes, 0);
  const SimulatorEvaluator ev(suite, kEmr);
  EXPECT_EQ(ev.evaluate(suite[0].key(), default_config()).runtime_s,
            simulate_runtime(suite[0], default_config(), kEmr).runtime_s);
  EXPECT_THROW(ev.evaluate({"nope", 100}, default_config()), InvalidWorkload);
  EXPECT_THROW(SimulatorEvaluator({suite[0], suite[0]}, kEmr), InvalidWorkload);
}

}  // namespace
}  // namespace zest
