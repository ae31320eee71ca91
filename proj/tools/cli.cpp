#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "zest/embed.hpp"
#include "zest/errors.hpp"
#include "zest/eval.hpp"
#include "zest/index.hpp"
#include "zest/json_io.hpp"
#include "zest/oracle.hpp"
#include "zest/plan.hpp"
#include "zest/recommend.hpp"
#include "zest/records.hpp"
#include "zest/space.hpp"
#include "zest/tpe.hpp"

namespace zest::cli {

namespace {

struct Common {
  std::string format = "json";
  std::uint64_t seed = 0;
  std::string profile = "emr";
  bool quiet = false;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path, e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

ConfigSpace load_space(const Common& c, const std::string& space_file) {
  if (!space_file.empty()) return ConfigSpace::load(space_file);
  return ConfigSpace::builtin(c.profile);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<PolicyCost> read_policies(const std::string& path) {
  const auto j = read_json_file(path);
  if (!j.is_array()) throw DataError(path, "expected a JSON array of policies");
  std::vector<PolicyCost> policies;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto where = path + "[" + std::to_string(i) + "]";
    try {
      PolicyCost p;
      p.policy = j[i].at("policy").get<std::string>();
      p.upfront_s = j[i].value("upfront_s", 0.0);
      p.per_exec_s = j[i].at("per_exec_s").get<double>();
      if (j[i].contains("schedule")) p.schedule = j[i]["schedule"].get<std::vector<double>>();
      p.validate();
      policies.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where, e.what());
    } catch (const std::invalid_argument& e) {
      throw DataError(where, e.what());
    }
  }
  return policies;
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-execution Spark configuration tuning by plan retrieval", "zest"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--seed", common.seed, "Random seed");
  app.add_option("--profile", common.profile, "Configuration space / cluster profile")
      ->check(CLI::IsMember({"emr", "local"}));
  app.add_flag("-q,--quiet", common.quiet, "Suppress progress messages on stderr");

  auto log = [&](const std::string& msg) {
    if (!common.quiet) err << msg << '\n';
  };

  std::function<int()> action;

  // ingest
  std::string ingest_records, ingest_mapping, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Validate and normalize an execution-record JSONL file");
  ingest->add_option("--records", ingest_records, "Input JSON Lines")->required();
  ingest->add_option("--mapping", ingest_mapping, "Field mapping JSON for foreign layouts");
  ingest->add_option("--out", ingest_out, "Normalized JSON Lines output")->required();
  ingest->callback([&] {
    action = [&] {
      std::optional<FieldMapping> mapping;
      if (!ingest_mapping.empty()) mapping = FieldMapping::load(ingest_mapping);
      auto result = read_records(ingest_records, mapping ? &*mapping : nullptr);
      auto o = open_out(ingest_out);
      write_records(o, result.records);
      std::set<std::string> ids;
      for (const auto& r : result.records) ids.insert(r.query_id);
      ordered_json j;
      j["records"] = result.records.size();
      j["skipped_failed"] = result.skipped_failed;
      j["queries"] = ids.size();
      if (common.format == "csv") {
        out << "records,skipped_failed,queries\n"
            << result.records.size() << ',' << result.skipped_failed << ',' << ids.size() << '\n';
      } else {
        emit(out, j);
      }
      log("wrote " + std::to_string(result.records.size()) + " records to " + ingest_out);
      return kOk;
    };
  });

  // split
  std::string split_records, split_train, split_test;
  double split_fraction = 0.1;
  auto* split = app.add_subcommand("split", "Split records into train and test sets by query id");
  split->add_option("--records", split_records, "Input JSON Lines")->required();
  split->add_option("--test-fraction", split_fraction, "Share of query ids held out")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  split->add_option("--train-out", split_train, "Train JSON Lines output")->required();
  split->add_option("--test-out", split_test, "Test JSON Lines output")->required();
  split->callback([&] {
    action = [&] {
      const auto records = read_records(split_records).records;
      const auto s = split_by_query(records, split_fraction, common.seed);
      auto train_out = open_out(split_train);
      write_records(train_out, s.train);
      auto test_out = open_out(split_test);
      write_records(test_out, s.test);
      if (common.format == "csv") {
        out << "query_id\n";
        for (const auto& id : s.test_query_ids) out << id << '\n';
      } else {
        ordered_json j;
        j["train_records"] = s.train.size();
        j["test_records"] = s.test.size();
        j["test_query_ids"] = s.test_query_ids;
        emit(out, j);
      }
      return kOk;
    };
  });

  // build-index
  std::string bi_records, bi_out, bi_embedder = "lexical", bi_endpoint, bi_model;
  std::size_t bi_dim = 4096;
  int bi_ngram_lo = 1, bi_ngram_hi = 3;
  bool bi_strip_literals = false;
  auto* build = app.add_subcommand("build-index", "Distill records into a retrieval index");
  build->add_option("--records", bi_records, "Execution records (JSON Lines)")->required();
  build->add_option("--out", bi_out, "Index file to write")->required();
  build->add_option("--embedder", bi_embedder, "Embedder kind")->check(CLI::IsMember({"lexical", "remote"}));
  build->add_option("--dim", bi_dim, "Embedding dimension")->capture_default_str();
  build->add_option("--ngram-lo", bi_ngram_lo, "Smallest token n-gram (lexical)")->capture_default_str();
  build->add_option("--ngram-hi", bi_ngram_hi, "Largest token n-gram (lexical)")->capture_default_str();
  build->add_option("--endpoint", bi_endpoint, "Embedding service URL (remote)");
  build->add_option("--model", bi_model, "Embedding model id (remote)");
  build->add_flag("--strip-literals", bi_strip_literals, "Replace literals with a placeholder before embedding");
  build->callback([&] {
    action = [&] {
      EmbedderSpec spec = bi_embedder == "remote" ? EmbedderSpec::remote(bi_endpoint, bi_model, bi_dim)
                                                  : EmbedderSpec::lexical(bi_dim, bi_ngram_lo, bi_ngram_hi);
      spec.validate();
      const auto records = read_records(bi_records).records;
      const auto embedder = make_embedder(spec);
      IndexBuildOptions options;
      options.canonicalize.strip_literals = bi_strip_literals;
      options.space_profile = common.profile;
      const auto index = build_index(records, *embedder, options);
      save_index(index, bi_out);
      ordered_json j;
      j["entries"] = index.size();
      j["dimension"] = index.dimension();
      j["model_id"] = index.embedder_spec().model_id;
      j["space_profile"] = index.space_profile();
      if (common.format == "csv") {
        out << "entries,dimension,model_id\n" << index.size() << ',' << index.dimension() << ','
            << index.embedder_spec().model_id << '\n';
      } else {
        emit(out, j);
      }
      log("indexed " + std::to_string(index.size()) + " (query, size) pairs into " + bi_out);
      return kOk;
    };
  });

  // tune / explain share their inputs.
  std::string t_plan, t_index, t_space;
  std::size_t t_k = 29;
  bool t_no_timing = false;
  auto add_tune_options = [&](CLI::App* sub) {
    sub->add_option("--plan", t_plan, "Logical plan text file")->required();
    sub->add_option("--index", t_index, "Index file")->required();
    sub->add_option("-k", t_k, "Number of neighbors")->capture_default_str();
    sub->add_option("--space", t_space, "Configuration space JSON overriding --profile");
  };
  auto load_tune_inputs = [&] {
    auto index = load_index(t_index);
    ZestParams params;
    params.k = t_k;
    params.embedder = index.embedder_spec();
    params.canonicalize = index.canonicalize_options();
    return std::make_tuple(std::move(index), params, load_space(common, t_space), read_text(t_plan));
  };

  auto* tune = app.add_subcommand("tune", "Recommend a configuration for a plan without running it");
  add_tune_options(tune);
  tune->add_flag("--no-timing", t_no_timing, "Report elapsed_ms as 0 for reproducible output");
  tune->callback([&] {
    action = [&] {
      auto [index, params, space, plan] = load_tune_inputs();
      auto rec = recommend(plan, index, params, space);
      if (t_no_timing) rec.elapsed_ms = 0.0;
      if (common.format == "csv") {
        out << "property,value\n";
        for (Param p : kAllParams) out << spark_property(p) << ',' << rec.config[p] << '\n';
      } else {
        emit(out, to_json(rec));
      }
      return kOk;
    };
  });

  auto* expl = app.add_subcommand("explain", "Show the nearest indexed plans and what they share with the probe");
  add_tune_options(expl);
  expl->callback([&] {
    action = [&] {
      auto [index, params, space, plan] = load_tune_inputs();
      const auto e = explain(plan, index, params, space);
      if (common.format == "text") {
        out << render(e);
      } else if (common.format == "csv") {
        out << "rank,query_id,input_gb,similarity,best_runtime_s,shared_tokens\n";
        int rank = 0;
        for (const auto& n : e.neighbors) {
          std::string shared;
          for (const auto& t : n.shared_tokens) shared += (shared.empty() ? "" : " ") + t;
          out << ++rank << ',' << n.neighbor.key.query_id << ',' << n.neighbor.key.input_gb << ','
              << n.neighbor.similarity << ',' << n.neighbor.best_runtime_s << ",\"" << shared << "\"\n";
        }
      } else {
        emit(out, to_json(e));
      }
      return kOk;
    };
  });

  // optimize
  std::string o_suite, o_out, o_constants, o_space, o_workload;
  int o_iters = 40;
  unsigned o_parallel = 1;
  std::optional<std::uint64_t> o_noise_seed;
  auto* optimize_cmd = app.add_subcommand("optimize", "Run TPE studies against the runtime simulator");
  optimize_cmd->add_option("--suite", o_suite, "Workload suite (JSON Lines)")->required();
  optimize_cmd->add_option("--out", o_out, "Trial records output (JSON Lines)")->required();
  optimize_cmd->add_option("--iters", o_iters, "Trials per study")->capture_default_str();
  optimize_cmd->add_option("--parallel", o_parallel, "Studies run at once")->capture_default_str();
  optimize_cmd->add_option("--constants", o_constants, "Simulator constants file");
  optimize_cmd->add_option("--noise-seed", o_noise_seed, "Enable runtime noise with this seed");
  optimize_cmd->add_option("--space", o_space, "Configuration space JSON overriding --profile");
  optimize_cmd->add_option("--workload", o_workload, "Only optimize this workload id");
  optimize_cmd->callback([&] {
    action = [&] {
      auto suite = read_suite(o_suite);
      if (!o_workload.empty()) {
        std::erase_if(suite, [&](const WorkloadSpec& w) { return w.workload_id != o_workload; });
        if (suite.empty()) throw DataError(o_suite, "no workload named " + o_workload);
      }
      const auto constants = o_constants.empty() ? SimulatorConstants{} : SimulatorConstants::load(o_constants);
      const auto space = load_space(common, o_space);
      SimulatorEvaluator evaluator(suite, ClusterSpec::builtin(common.profile), constants, o_noise_seed);
      std::vector<IndexKey> keys;
      for (const auto& w : suite) keys.push_back(w.key());
      const auto studies = optimize_suite(space, evaluator, keys, o_iters, common.seed, {}, o_parallel);

      auto trials_out = open_out(o_out);
      ordered_json summary = ordered_json::array();
      if (common.format == "csv") out << "query_id,input_gb,best_runtime_s,default_runtime_s,failures\n";
      for (std::size_t i = 0; i < studies.size(); ++i) {
        const auto& s = studies[i];
        write_study_records(trials_out, s, suite[i], common.profile);
        const auto best = s.study.best();
        const auto failures = std::count_if(s.study.trials().begin(), s.study.trials().end(),
                                            [](const Trial& t) { return t.failed(); });
        const auto def = evaluator.evaluate(s.key, clamp(default_config(), space));
        if (common.format == "csv") {
          out << s.key.query_id << ',' << s.key.input_gb << ',' << (best ? std::to_string(*best->cost_s) : "") << ','
              << (def.ok() ? std::to_string(def.runtime_s) : "") << ',' << failures << '\n';
          continue;
        }
        ordered_json j;
        j["query_id"] = s.key.query_id;
        j["input_gb"] = s.key.input_gb;
        j["best_runtime_s"] = best ? ordered_json(*best->cost_s) : ordered_json(nullptr);
        j["best_config"] = best ? config_to_json(best->config) : ordered_json(nullptr);
        j["default_runtime_s"] = def.ok() ? ordered_json(def.runtime_s) : ordered_json(nullptr);
        j["failures"] = failures;
        summary.push_back(std::move(j));
      }
      if (common.format != "csv") emit(out, summary);
      log("ran " + std::to_string(studies.size()) + " studies of " + std::to_string(o_iters) + " trials");
      return kOk;
    };
  });

  // generate-suite
  int g_families = 5, g_members = 4;
  std::string g_sizes = "100,250,500,750", g_out;
  auto* gen = app.add_subcommand("generate-suite", "Write a synthetic workload suite");
  gen->add_option("--families", g_families, "Number of workload families")->capture_default_str();
  gen->add_option("--members", g_members, "Members per family")->capture_default_str();
  gen->add_option("--sizes", g_sizes, "Comma-separated input sizes in GB")->capture_default_str();
  gen->add_option("--out", g_out, "Suite file (default: stdout)");
  gen->callback([&] {
    action = [&] {
      std::vector<double> sizes;
      for (const auto& s : split_csv(g_sizes)) {
        try {
          sizes.push_back(std::stod(s));
        } catch (const std::exception&) {
          throw std::invalid_argument("bad size '" + s + "'");
        }
      }
      const auto suite = generate_suite(g_families, g_members, sizes, common.seed);
      if (g_out.empty()) {
        write_suite(out, suite);
      } else {
        write_suite(std::filesystem::path(g_out), suite);
        log("wrote " + std::to_string(suite.size()) + " workloads to " + g_out);
      }
      return kOk;
    };
  });

  // simulate
  std::string sim_suite, sim_workload, sim_config, sim_constants;
  std::optional<double> sim_size;
  std::optional<std::uint64_t> sim_noise_seed;
  auto* sim = app.add_subcommand("simulate", "Price one configuration with the runtime simulator");
  sim->add_option("--suite", sim_suite, "Workload suite (JSON Lines)")->required();
  sim->add_option("--workload", sim_workload, "Workload id (default: every workload)");
  sim->add_option("--input-gb", sim_size, "Only this input size");
  sim->add_option("--config", sim_config, "Configuration JSON, or @file (default: Spark defaults)");
  sim->add_option("--constants", sim_constants, "Simulator constants file");
  sim->add_option("--noise-seed", sim_noise_seed, "Enable runtime noise with this seed");
  sim->callback([&] {
    action = [&] {
      Configuration config = default_config();
      if (!sim_config.empty()) {
        const auto text = sim_config.front() == '@' ? read_text(sim_config.substr(1)) : sim_config;
        try {
          config = config_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
          throw std::invalid_argument(std::string("--config: ") + e.what());
        }
      }
      const auto constants = sim_constants.empty() ? SimulatorConstants{} : SimulatorConstants::load(sim_constants);
      const auto cluster = ClusterSpec::builtin(common.profile);
      ordered_json results = ordered_json::array();
      if (common.format == "csv") out << "workload_id,input_gb,status,runtime_s\n";
      std::size_t matched = 0;
      for (const auto& w : read_suite(sim_suite)) {
        if (!sim_workload.empty() && w.workload_id != sim_workload) continue;
        if (sim_size && w.input_gb != *sim_size) continue;
        ++matched;
        const auto r = simulate_breakdown(w, config, cluster, sim_noise_seed, constants);
        if (common.format == "csv") {
          out << w.workload_id << ',' << w.input_gb << ',' << (r ? "ok" : "failure") << ','
              << (r ? std::to_string(r->total_s) : "") << '\n';
          continue;
        }
        ordered_json j;
        j["workload_id"] = w.workload_id;
        j["input_gb"] = w.input_gb;
        j["status"] = r ? "ok" : "failure";
        if (r) {
          j["runtime_s"] = r->total_s;
          j["compute_s"] = r->compute_s;
          j["shuffle_s"] = r->shuffle_s;
          j["driver_s"] = r->driver_s;
          j["spill_multiplier"] = r->spill_multiplier;
        }
        results.push_back(std::move(j));
      }
      if (matched == 0) throw DataError(sim_suite, "no workload matches the selection");
      if (common.format != "csv") {
        ordered_json j;
        j["config"] = config_to_json(config);
        j["cluster"] = cluster.name;
        j["results"] = std::move(results);
        emit(out, j);
      }
      return kOk;
    };
  });

  // evaluate
  std::string ev_policies, ev_reference = "zest";
  int ev_n_max = 200;
  auto* evaluate = app.add_subcommand("evaluate", "Accumulated-cost curves and break-even points");
  evaluate->add_option("--policies", ev_policies, "Policy costs (JSON array)")->required();
  evaluate->add_option("--n-max", ev_n_max, "Longest curve")->capture_default_str();
  evaluate->add_option("--reference", ev_reference, "Zero-upfront policy compared against")->capture_default_str();
  evaluate->callback([&] {
    action = [&] {
      const auto policies = read_policies(ev_policies);
      const auto ref = std::find_if(policies.begin(), policies.end(),
                                    [&](const PolicyCost& p) { return p.policy == ev_reference; });
      if (ref == policies.end()) throw DataError(ev_policies, "no policy named " + ev_reference);
      std::vector<CostCurve> curves;
      std::vector<BreakEvenRow> rows;
      for (const auto& p : policies) {
        curves.push_back(accumulated_cost(p, ev_n_max));
        if (&p == &*ref) continue;
        rows.push_back({p.policy, p.schedule.empty()
                                      ? break_even(p.upfront_s, p.per_exec_s, ref->per_exec_s)
                                      : std::optional<int>{}});
        if (!p.schedule.empty()) {
          // Schedule policies: first n where the curve drops below the reference.
          const auto& mine = curves.back().points;
          const auto reference = accumulated_cost(*ref, ev_n_max).points;
          for (std::size_t i = 0; i < mine.size(); ++i) {
            if (mine[i].accumulated_s < reference[i].accumulated_s) {
              rows.back().n = mine[i].n;
              break;
            }
          }
        }
      }
      if (common.format == "csv") {
        out << curves_csv(curves);
      } else {
        ordered_json j;
        j["reference"] = ev_reference;
        auto jc = ordered_json::array();
        for (const auto& c : curves) jc.push_back(to_json(c));
        j["curves"] = std::move(jc);
        auto jb = ordered_json::array();
        for (const auto& r : rows) {
          jb.push_back({{"policy", r.policy}, {"break_even", r.n ? ordered_json(*r.n) : ordered_json("never")}});
        }
        j["break_even"] = std::move(jb);
        emit(out, j);
      }
      return kOk;
    };
  });

  // report
  std::string rep_index, rep_policies, rep_totals, rep_reference = "zest", rep_space;
  bool rep_histograms = false, rep_break_even = false;
  int rep_bins = 10;
  auto* report = app.add_subcommand("report", "Tables for optimal-parameter histograms, totals and break-even");
  report->add_flag("--histograms", rep_histograms, "Histograms of indexed optimal configurations");
  report->add_option("--index", rep_index, "Index file (for --histograms)");
  report->add_option("--bins", rep_bins, "Histogram bins")->capture_default_str();
  report->add_option("--space", rep_space, "Configuration space JSON overriding --profile");
  report->add_flag("--break-even", rep_break_even, "Break-even table from --policies");
  report->add_option("--policies", rep_policies, "Policy costs (JSON array)");
  report->add_option("--reference", rep_reference, "Zero-upfront policy compared against")->capture_default_str();
  report->add_option("--totals", rep_totals, "Totals table: JSON array of {policy, dataset, total_s}");
  report->callback([&] {
    action = [&] {
      if (!rep_histograms && !rep_break_even && rep_totals.empty()) {
        throw CLI::ValidationError("report", "choose at least one of --histograms, --break-even, --totals");
      }
      ordered_json j = ordered_json::object();
      if (rep_histograms) {
        if (rep_index.empty()) throw CLI::RequiredError("--index");
        const auto index = load_index(rep_index);
        const auto hist = param_histograms(index, load_space(common, rep_space), rep_bins);
        if (common.format == "csv") out << histograms_csv(hist);
        j["histograms"] = histograms_json(hist);
      }
      if (rep_break_even) {
        if (rep_policies.empty()) throw CLI::RequiredError("--policies");
        const auto policies = read_policies(rep_policies);
        const auto ref = std::find_if(policies.begin(), policies.end(),
                                      [&](const PolicyCost& p) { return p.policy == rep_reference; });
        if (ref == policies.end()) throw DataError(rep_policies, "no policy named " + rep_reference);
        std::vector<BreakEvenRow> rows;
        for (const auto& p : policies) {
          if (&p != &*ref) rows.push_back({p.policy, break_even(p.upfront_s, p.per_exec_s, ref->per_exec_s)});
        }
        if (common.format == "csv") out << break_even_csv(rows);
        auto jb = ordered_json::array();
        for (const auto& r : rows) {
          jb.push_back({{"policy", r.policy}, {"n_or_never", r.n ? ordered_json(*r.n) : ordered_json("never")}});
        }
        j["break_even"] = std::move(jb);
      }
      if (!rep_totals.empty()) {
        const auto jt = read_json_file(rep_totals);
        std::vector<TotalRow> rows;
        try {
          for (const auto& r : jt) {
            rows.push_back({r.at("policy").get<std::string>(), r.at("dataset").get<std::string>(),
                            r.at("total_s").get<double>()});
          }
        } catch (const nlohmann::json::exception& e) {
          throw DataError(rep_totals, e.what());
        }
        if (common.format == "csv") out << totals_csv(rows);
        std::map<std::string, double> defaults;
        for (const auto& r : rows) {
          if (r.policy == "default") defaults[r.dataset] = r.total_s;
        }
        auto jr = ordered_json::array();
        for (const auto& r : rows) {
          ordered_json row{{"policy", r.policy}, {"dataset", r.dataset}, {"total_s", r.total_s}};
          if (auto d = defaults.find(r.dataset); d != defaults.end() && r.total_s > 0) {
            row["speedup_over_default"] = speedup(d->second, r.total_s);
          }
          jr.push_back(std::move(row));
        }
        j["totals"] = std::move(jr);
      }
      if (common.format != "csv") emit(out, j);
      return kOk;
    };
  });

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "zest: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (common.format == "text" && !expl->parsed()) throw std::invalid_argument("--format text applies to explain only");
    return action();
  } catch (const CLI::Error& e) {
    err << "zest: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "zest: data error: " << e.what() << '\n';
    return kData;
  } catch (const ParseError& e) {
    err << "zest: plan parse error: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "zest: " << e.what() << '\n';
    return kData;
  } catch (const nlohmann::json::exception& e) {
    err << "zest: data error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    err << "zest: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "zest: " << e.what() << '\n';
    return kData;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace zest::cli
