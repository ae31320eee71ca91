#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "zest/oracle.hpp"
#include "zest/records.hpp"
#include "zest/tpe.hpp"

namespace zest {
namespace {

const ConfigSpace kEmr = ConfigSpace::emr();

Evaluation bowl(const Configuration& c) {
  // Smooth bowl with its minimum at (400, 12, 8, 3, 20, 5).
  const double d = std::pow((c.shuffle_partitions - 400) / 950.0, 2) + std::pow((c.executor_instances - 12) / 27.0, 2) +
                   std::pow((c.driver_memory_gb - 8) / 43.0, 2) + std::pow((c.driver_cores - 3) / 6.0, 2) +
                   std::pow((c.executor_memory_gb - 20) / 43.0, 2) + std::pow((c.executor_cores - 5) / 6.0, 2);
  return Evaluation::success(10.0 + 100.0 * d);
}

TEST(Study, EmptyStudySuggestsDefault) {
  EXPECT_EQ(Study(kEmr, 0).suggest(), default_config());
  EXPECT_EQ(Study(ConfigSpace::local(), 5).suggest(), default_config());
}

TEST(Study, StartupSamplesAreReproducible) {
  Study a(kEmr, 42), b(kEmr, 42), c(kEmr, 43);
  for (int i = 0; i < 3; ++i) {
    const auto x = a.suggest();
    EXPECT_EQ(x, b.suggest());
    a.tell(x, 1.0 + i);
    b.tell(x, 1.0 + i);
    c.tell(x, 1.0 + i);
  }
  const auto s = a.suggest();
  EXPECT_TRUE(kEmr.contains(s));
  EXPECT_EQ(s, b.suggest());
  EXPECT_NE(s, c.suggest());
}

TEST(Study, BestSkipsFailures) {
  Study s(kEmr, 0);
  s.tell(default_config(), 5.0);
  EXPECT_EQ(s.best()->config, default_config());

  Study f(kEmr, 0);
  f.tell(default_config(), std::nullopt);
  EXPECT_FALSE(f.best());

  std::mt19937_64 rng(1);
  Study mixed(kEmr, 0);
  std::optional<double> expect;
  for (int i = 0; i < 50; ++i) {
    const bool fail = rng() % 3 == 0;
    const double cost = 1.0 + static_cast<double>(rng() % 1000);
    mixed.tell(random_sample(kEmr, rng), fail ? std::nullopt : std::optional<double>(cost));
    if (!fail) expect = expect ? std::min(*expect, cost) : cost;
  }
  EXPECT_EQ(mixed.best()->cost_s, expect);
  const auto curve = mixed.best_so_far();
  ASSERT_EQ(curve.size(), 50u);
  EXPECT_EQ(curve.back(), expect);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i - 1]) EXPECT_LE(*curve[i], *curve[i - 1]);
  }
}

TEST(Study, TellRejectsBadCosts) {
  Study s(kEmr, 0);
  EXPECT_THROW(s.tell(default_config(), 0.0), std::invalid_argument);
  EXPECT_THROW(s.tell(default_config(), -1.0), std::invalid_argument);
  EXPECT_THROW(s.tell(default_config(), std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Params, Validation) {
  TpeParams p;
  EXPECT_NO_THROW(p.validate());
  p.gamma_fraction = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.n_candidates = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Propose, ConcentratesOnKnownBasin) {
  const std::vector<Range> ranges{{0, 100}};
  std::mt19937_64 data_rng(12);
  std::vector<Observation> history;
  for (int i = 0; i < 30; ++i) {
    const auto x = std::uniform_int_distribution<std::int64_t>(0, 100)(data_rng);
    history.push_back({{x}, 1.0 + std::abs(static_cast<double>(x) - 20.0)});
  }
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const auto p = tpe_propose(ranges, history, TpeParams{}, rng);
    ASSERT_EQ(p.size(), 1u);
    inside += p[0] >= 5 && p[0] <= 35;
  }
  EXPECT_GE(inside, 160);
}

TEST(Propose, StaysInBoxAndFallsBackToUniform) {
  const std::vector<Range> ranges{{3, 9}, {100, 101}};
  std::mt19937_64 rng(0);
  std::vector<Observation> one{{{5, 100}, 1.0}};
  for (int i = 0; i < 100; ++i) {
    const auto p = tpe_propose(ranges, one, TpeParams{}, rng);
    EXPECT_GE(p[0], 3);
    EXPECT_LE(p[0], 9);
    EXPECT_GE(p[1], 100);
    EXPECT_LE(p[1], 101);
  }
}

TEST(Optimize, SingleIterationIsDefault) {
  const auto s = optimize(kEmr, bowl, 1, 0);
  ASSERT_EQ(s.trials().size(), 1u);
  EXPECT_EQ(s.trials()[0].config, default_config());
}

TEST(Optimize, ConstantObjective) {
  const auto s = optimize(kEmr, [](const Configuration&) { return Evaluation::success(7.5); }, 30, 3);
  EXPECT_EQ(s.trials().size(), 30u);
  EXPECT_EQ(s.best()->cost_s, 7.5);
}

TEST(Optimize, ExceptionsAndMissingBecomeFailures) {
  int calls = 0;
  const auto s = optimize(
      kEmr,
      [&](const Configuration& c) {
        ++calls;
        if (calls % 3 == 0) throw std::runtime_error("executor lost");
        if (calls % 3 == 1) return Evaluation::missing();
        return bowl(c);
      },
      12, 0);
  EXPECT_EQ(calls, 12);
  int failed = 0;
  for (const auto& t : s.trials()) failed += t.failed();
  EXPECT_EQ(failed, 8);
}

TEST(Optimize, BeatsRandomOnBowl) {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = optimize(kEmr, bowl, 40, seed);
    const auto r = random_search(kEmr, bowl, 40, seed);
    wins += *t.best()->cost_s <= *r.best()->cost_s;
    // Same seed, same startup phase: the comparison is paired.
    for (int i = 0; i < 10; ++i) EXPECT_EQ(t.trials()[i].config, r.trials()[i].config);
  }
  EXPECT_GE(wins, 14);
}

TEST(Optimize, AvoidsOverCommitFailures) {
  const std::vector<double> sizes{250};
  const auto suite = generate_suite(1, 1, sizes, 4);
  const auto cluster = ClusterSpec::emr_like();
  const Objective sim = [&](const Configuration& c) { return simulate_runtime(suite[0], c, cluster); };
  const auto s = optimize(kEmr, sim, 40, 0);
  int late_failures = 0, early_failures = 0;
  for (const auto& t : s.trials()) (t.number < 20 ? early_failures : late_failures) += t.failed();
  EXPECT_LE(late_failures, early_failures + 2);
  EXPECT_LT(*s.best()->cost_s, simulate_runtime(suite[0], default_config(), cluster).runtime_s);
}

TEST(Optimize, Deterministic) {
  EXPECT_EQ(optimize(kEmr, bowl, 40, 9).trials(), optimize(kEmr, bowl, 40, 9).trials());
  EXPECT_NE(optimize(kEmr, bowl, 40, 9).trials(), optimize(kEmr, bowl, 40, 10).trials());
}

TEST(Schedule, FailuresCharged) {
  Study s(kEmr, 0);
  s.tell(default_config(), 10.0);
  s.tell(default_config(), std::nullopt);
  s.tell(default_config(), 4.0);
  EXPECT_EQ(cost_schedule(s, 99.0), (std::vector<double>{10.0, 99.0, 4.0}));
}

TEST(Suite, ParallelMatchesSerial) {
  const std::vector<double> sizes{100, 500};
  const auto suite = generate_suite(2, 2, sizes, 1);
  const SimulatorEvaluator ev(suite, ClusterSpec::emr_like());
  std::vector<IndexKey> keys;
  for (const auto& w : suite) keys.push_back(w.key());
  const auto serial = optimize_suite(kEmr, ev, keys, 15, 5, {}, 1);
  const auto parallel = optimize_suite(kEmr, ev, keys, 15, 5, {}, 4);
  ASSERT_EQ(serial.size(), keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    EXPECT_EQ(serial[i].key, keys[i]);
    EXPECT_EQ(serial[i].study.trials(), parallel[i].study.trials());
    EXPECT_EQ(serial[i].study.seed(), study_seed(5, keys[i]));
  }
  EXPECT_NE(study_seed(5, keys[0]), study_seed(5, keys[1]));
}

TEST(Suite, ErrorsPropagate) {
  const std::vector<double> sizes{100};
  const auto suite = generate_suite(1, 1, sizes, 1);
  const SimulatorEvaluator ev(suite, ClusterSpec::emr_like());
  const std::vector<IndexKey> keys{{"missing", 100}};
  // An unknown key is an exception inside the objective, so every trial fails.
  const auto out = optimize_suite(kEmr, ev, keys, 3, 0);
  EXPECT_FALSE(out[0].study.best());
}

TEST(Records, StudyExportRoundTrips) {
  const std::vector<double> sizes{100};
  const auto suite = generate_suite(1, 1, sizes, 2);
  const SimulatorEvaluator ev(suite, ClusterSpec::emr_like());
  const std::vector<IndexKey> keys{suite[0].key()};
  const auto studies = optimize_suite(kEmr, ev, keys, 20, 0);
  std::stringstream buf;
  write_study_records(buf, studies[0], suite[0], "emr");
  std::size_t lines = 0, failed = 0;
  for (std::string line; std::getline(buf, line);) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["trial"].get<int>(), static_cast<int>(lines));
    ++lines;
    failed += j["runtime_s"].is_null();
  }
  EXPECT_EQ(lines, 20u);
  buf.clear();
  buf.seekg(0);
  const auto res = read_records(buf, "study");
  EXPECT_EQ(res.records.size() + res.skipped_failed, 20u);
  EXPECT_EQ(res.skipped_failed, failed);
}

}  // namespace
}  // namespace zest
