#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "zest/embed.hpp"
#include "zest/errors.hpp"
#include "zest/eval.hpp"
#include "zest/index.hpp"
#include "zest/oracle.hpp"
#include "zest/plan.hpp"
#include "zest/recommend.hpp"
#include "zest/records.hpp"
#include "zest/space.hpp"
#include "zest/tpe.hpp"

namespace py = pybind11;
using namespace zest;

namespace {

py::dict config_dict(const Configuration& c) {
  py::dict d;
  for (Param p : kAllParams) d[py::str(std::string(spark_property(p)))] = c[p];
  return d;
}

Configuration config_from_dict(const py::dict& d) {
  Configuration c;
  for (auto item : d) {
    const auto key = py::cast<std::string>(item.first);
    const auto p = param_from_spark_property(key);
    if (!p) throw std::invalid_argument("unknown configuration key " + key);
    c[*p] = py::cast<std::int64_t>(item.second);
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zero-execution Spark configuration tuning";

  auto base = py::register_exception<Error>(m, "ZestError");
  py::register_exception<ParseError>(m, "PlanParseError", base.ptr());
  py::register_exception<EmbedderMismatch>(m, "EmbedderMismatch", base.ptr());
  py::register_exception<EmptyIndex>(m, "EmptyIndex", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<FormatVersionError>(m, "FormatVersionError", base.ptr());

  py::class_<Configuration>(m, "Configuration")
      .def(py::init<>())
      .def(py::init([](std::int64_t p, std::int64_t i, std::int64_t dm, std::int64_t dc, std::int64_t em,
                       std::int64_t ec) { return Configuration{p, i, dm, dc, em, ec}; }),
           py::arg("shuffle_partitions"), py::arg("executor_instances"), py::arg("driver_memory_gb"),
           py::arg("driver_cores"), py::arg("executor_memory_gb"), py::arg("executor_cores"))
      .def_readwrite("shuffle_partitions", &Configuration::shuffle_partitions)
      .def_readwrite("executor_instances", &Configuration::executor_instances)
      .def_readwrite("driver_memory_gb", &Configuration::driver_memory_gb)
      .def_readwrite("driver_cores", &Configuration::driver_cores)
      .def_readwrite("executor_memory_gb", &Configuration::executor_memory_gb)
      .def_readwrite("executor_cores", &Configuration::executor_cores)
      .def("as_tuple", &Configuration::as_tuple)
      .def("to_dict", &config_dict)
      .def_static("from_dict", &config_from_dict)
      .def("__eq__", [](const Configuration& a, const Configuration& b) { return a == b; })
      .def("__repr__", [](const Configuration& c) { return "Configuration" + to_string(c); });

  py::class_<ConfigSpace>(m, "ConfigSpace")
      .def_static("emr", &ConfigSpace::emr)
      .def_static("local", &ConfigSpace::local)
      .def_static("builtin", &ConfigSpace::builtin)
      .def_static("load", &ConfigSpace::load)
      .def_property_readonly("profile_name", &ConfigSpace::profile_name)
      .def("range",
           [](const ConfigSpace& s, const std::string& name) {
             const auto p = param_from_spark_property(name);
             if (!p) throw std::invalid_argument("unknown parameter " + name);
             return std::make_pair(s.range(*p).lo, s.range(*p).hi);
           })
      .def("contains", &ConfigSpace::contains)
      .def("clamp", [](const ConfigSpace& s, const Configuration& c) { return clamp(c, s); });

  m.def("default_config", &default_config);
  m.def("aggregate_mean", [](const std::vector<Configuration>& cs, const ConfigSpace& s) { return aggregate_mean(cs, s); });

  m.def(
      "canonicalize",
      [](const std::string& text, bool strip_literals) {
        CanonicalizeOptions o;
        o.strip_literals = strip_literals;
        return canonicalize(parse_plan(text), o);
      },
      py::arg("plan_text"), py::arg("strip_literals") = false);
  m.def("tokenize", &tokenize);

  py::class_<EmbedderSpec>(m, "EmbedderSpec")
      .def_static("lexical", &EmbedderSpec::lexical, py::arg("dimension") = 4096, py::arg("ngram_lo") = 1,
                  py::arg("ngram_hi") = 3)
      .def_static("remote", &EmbedderSpec::remote, py::arg("endpoint"), py::arg("model_id"), py::arg("dimension"))
      .def_readonly("dimension", &EmbedderSpec::dimension)
      .def_readonly("model_id", &EmbedderSpec::model_id);

  m.def(
      "embed", [](const EmbedderSpec& spec, const std::string& text) { return embed(spec, text).values; },
      py::arg("spec"), py::arg("text"));
  m.def("cosine", [](const std::vector<float>& a, const std::vector<float>& b) { return cosine(a, b); });

  py::class_<ExecutionRecord>(m, "ExecutionRecord")
      .def(py::init<>())
      .def_readwrite("query_id", &ExecutionRecord::query_id)
      .def_readwrite("catalog", &ExecutionRecord::catalog)
      .def_readwrite("input_gb", &ExecutionRecord::input_gb)
      .def_readwrite("logical_plan", &ExecutionRecord::logical_plan)
      .def_readwrite("config", &ExecutionRecord::config)
      .def_readwrite("runtime_s", &ExecutionRecord::runtime_s)
      .def_readwrite("cluster_profile", &ExecutionRecord::cluster_profile);
  m.def("read_records", [](const std::filesystem::path& p) { return read_records(p).records; });

  py::class_<RetrievalIndex>(m, "RetrievalIndex")
      .def("__len__", &RetrievalIndex::size)
      .def_property_readonly("dimension", &RetrievalIndex::dimension)
      .def("keys",
           [](const RetrievalIndex& idx) {
             std::vector<std::pair<std::string, std::int64_t>> keys;
             for (const auto& e : idx.entries()) keys.emplace_back(e.key.query_id, e.key.input_gb);
             return keys;
           })
      .def("best_config", [](const RetrievalIndex& idx, const std::string& q, std::int64_t gb) {
        const auto* e = idx.find({q, gb});
        if (e == nullptr) throw py::key_error(q + "@" + std::to_string(gb));
        return e->best_config;
      });

  m.def(
      "build_index",
      [](const std::vector<ExecutionRecord>& records, const EmbedderSpec& spec, const std::string& profile) {
        const auto embedder = make_embedder(spec);
        IndexBuildOptions o;
        o.space_profile = profile;
        return build_index(records, *embedder, o);
      },
      py::arg("records"), py::arg("embedder") = EmbedderSpec::lexical(), py::arg("profile") = "emr");
  m.def("save_index", &save_index);
  m.def("load_index", &load_index);

  m.def(
      "recommend",
      [](const std::string& plan, const RetrievalIndex& index, std::size_t k, const ConfigSpace& space) {
        ZestParams params;
        params.k = k;
        params.embedder = index.embedder_spec();
        const auto rec = recommend(plan, index, params, space);
        py::list neighbors;
        for (const auto& n : rec.neighbors) {
          neighbors.append(py::make_tuple(n.key.query_id, n.key.input_gb, n.similarity, n.best_config));
        }
        py::dict out;
        out["config"] = rec.config;
        out["neighbors"] = neighbors;
        out["elapsed_ms"] = rec.elapsed_ms;
        return out;
      },
      py::arg("plan_text"), py::arg("index"), py::arg("k") = 29, py::arg("space") = ConfigSpace::emr());

  py::class_<WorkloadSpec>(m, "WorkloadSpec")
      .def_readonly("workload_id", &WorkloadSpec::workload_id)
      .def_readonly("family_id", &WorkloadSpec::family_id)
      .def_readonly("catalog", &WorkloadSpec::catalog)
      .def_readonly("input_gb", &WorkloadSpec::input_gb)
      .def_readonly("plan_text", &WorkloadSpec::plan_text);
  py::class_<ClusterSpec>(m, "ClusterSpec")
      .def_static("emr_like", &ClusterSpec::emr_like)
      .def_static("local_like", &ClusterSpec::local_like)
      .def_readonly("total_cores", &ClusterSpec::total_cores)
      .def_readonly("total_memory_gb", &ClusterSpec::total_memory_gb);

  m.def(
      "generate_suite",
      [](int families, int members, const std::vector<double>& sizes, std::uint64_t seed) {
        return generate_suite(families, members, sizes, seed);
      },
      py::arg("families") = 5, py::arg("members") = 4, py::arg("sizes") = std::vector<double>{100, 250, 500, 750},
      py::arg("seed") = 0);
  m.def(
      "simulate_runtime",
      [](const WorkloadSpec& w, const Configuration& c, const ClusterSpec& cl) -> std::optional<double> {
        const auto e = simulate_runtime(w, c, cl);
        if (!e.ok()) return std::nullopt;
        return e.runtime_s;
      },
      py::arg("workload"), py::arg("config"), py::arg("cluster") = ClusterSpec::emr_like(),
      "Runtime in seconds, or None when the configuration over-commits the cluster.");

  m.def(
      "optimize",
      [](const ConfigSpace& space, const std::function<std::optional<double>(const Configuration&)>& objective,
         int n_iters, std::uint64_t seed) {
        const auto study = optimize(
            space,
            [&](const Configuration& c) {
              py::gil_scoped_acquire gil;
              const auto cost = objective(c);
              return cost ? Evaluation::success(*cost) : Evaluation::failed();
            },
            n_iters, seed);
        py::list trials;
        for (const auto& t : study.trials()) trials.append(py::make_tuple(t.number, t.config, t.cost_s));
        return trials;
      },
      py::arg("space"), py::arg("objective"), py::arg("n_iters") = 40, py::arg("seed") = 0,
      "TPE study; the objective returns a runtime or None for a failed run. Returns (number, config, cost) tuples.");

  m.def("break_even", &break_even, py::arg("upfront_s"), py::arg("t_method_s"), py::arg("t_zest_s"));
  m.def("speedup", &speedup);
  m.def(
      "improvement_retention",
      [](double ref, double cand, std::optional<double> def) {
        const auto r = improvement_retention(ref, cand, def);
        return py::make_tuple(r.ratio_direct, r.ratio_improvement);
      },
      py::arg("t_ref_s"), py::arg("t_candidate_s"), py::arg("t_default_s") = py::none());
}
