#include "zest/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zest/errors.hpp"

namespace zest {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

std::string format_number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

void PolicyCost::validate() const {
  if (!(upfront_s >= 0.0) || !std::isfinite(upfront_s)) throw std::invalid_argument("upfront_s must be non-negative");
  require_positive(per_exec_s, "per_exec_s");
  for (double s : schedule) require_positive(s, "schedule entries");
}

CostCurve accumulated_cost(const PolicyCost& p, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  p.validate();
  CostCurve curve;
  curve.policy = p.policy;
  curve.points.reserve(static_cast<std::size_t>(n_max));
  double total = p.upfront_s;
  for (int n = 1; n <= n_max; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    total += i < p.schedule.size() ? p.schedule[i] : p.per_exec_s;
    curve.points.push_back({n, total});
  }
  return curve;
}

std::optional<int> break_even(double upfront_s, double t_method_s, double t_zest_s) {
  if (!(upfront_s >= 0.0)) throw std::invalid_argument("upfront cost must be non-negative");
  require_positive(t_method_s, "t_method_s");
  require_positive(t_zest_s, "t_zest_s");
  if (t_method_s >= t_zest_s) return std::nullopt;
  auto n = static_cast<long long>(std::floor(upfront_s / (t_zest_s - t_method_s))) + 1;
  // The quotient can land a hair off an integer; settle on the exact inequality.
  auto cheaper = [&](long long m) {
    const double md = static_cast<double>(m);
    return upfront_s + md * t_method_s < md * t_zest_s;
  };
  while (!cheaper(n)) ++n;
  while (n > 1 && cheaper(n - 1)) --n;
  return static_cast<int>(n);
}

double speedup(double default_s, double tuned_s) {
  require_positive(default_s, "default runtime");
  require_positive(tuned_s, "tuned runtime");
  return default_s / tuned_s;
}

Retention improvement_retention(double t_ref_s, double t_candidate_s, std::optional<double> t_default_s) {
  require_positive(t_ref_s, "reference runtime");
  require_positive(t_candidate_s, "candidate runtime");
  Retention r;
  r.ratio_direct = t_ref_s / t_candidate_s;
  if (t_default_s) {
    require_positive(*t_default_s, "default runtime");
    if (*t_default_s != t_ref_s) r.ratio_improvement = (*t_default_s - t_candidate_s) / (*t_default_s - t_ref_s);
  }
  return r;
}

std::vector<ParamHistogram> param_histograms(const RetrievalIndex& index, const ConfigSpace& space, int bins) {
  if (index.empty()) throw EmptyIndex();
  if (bins < 1) throw std::invalid_argument("bins must be at least 1");
  std::vector<ParamHistogram> out;
  for (Param p : kAllParams) {
    const auto& r = space.range(p);
    const double lo = static_cast<double>(r.lo);
    const double width = static_cast<double>(r.hi - r.lo + 1) / bins;
    ParamHistogram h{p, {}};
    for (int b = 0; b < bins; ++b) h.bins.push_back({lo + b * width, lo + (b + 1) * width, 0});
    for (const auto& e : index.entries()) {
      const auto v = std::clamp(e.best_config[p], r.lo, r.hi);
      auto b = static_cast<int>(std::floor(static_cast<double>(v - r.lo) / width));
      b = std::clamp(b, 0, bins - 1);
      ++h.bins[static_cast<std::size_t>(b)].count;
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::string histograms_csv(std::span<const ParamHistogram> histograms) {
  std::ostringstream out;
  out << "param,bin_lo,bin_hi,count\n";
  for (const auto& h : histograms) {
    for (const auto& b : h.bins) {
      out << spark_property(h.param) << ',' << format_number(b.lo) << ',' << format_number(b.hi) << ',' << b.count
          << '\n';
    }
  }
  return out.str();
}

ordered_json histograms_json(std::span<const ParamHistogram> histograms) {
  ordered_json j = ordered_json::object();
  for (const auto& h : histograms) {
    ordered_json bins = ordered_json::array();
    for (const auto& b : h.bins) bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    j[std::string(spark_property(h.param))] = std::move(bins);
  }
  return j;
}

std::string totals_csv(std::span<const TotalRow> rows) {
  std::ostringstream out;
  out << "policy,dataset,total_s\n";
  for (const auto& r : rows) out << r.policy << ',' << r.dataset << ',' << format_number(r.total_s) << '\n';
  return out.str();
}

std::string break_even_csv(std::span<const BreakEvenRow> rows) {
  std::ostringstream out;
  out << "policy,n_or_never\n";
  for (const auto& r : rows) out << r.policy << ',' << (r.n ? std::to_string(*r.n) : "never") << '\n';
  return out.str();
}

std::string curves_csv(std::span<const CostCurve> curves) {
  std::ostringstream out;
  out << 'n';
  std::size_t rows = 0;
  for (const auto& c : curves) {
    out << ',' << c.policy;
    rows = std::max(rows, c.points.size());
  }
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    out << i + 1;
    for (const auto& c : curves) {
      out << ',';
      if (i < c.points.size()) out << format_number(c.points[i].accumulated_s);
    }
    out << '\n';
  }
  return out.str();
}

ordered_json to_json(const CostCurve& curve) {
  ordered_json j;
  j["policy"] = curve.policy;
  ordered_json points = ordered_json::array();
  for (const auto& p : curve.points) points.push_back({{"n", p.n}, {"accumulated_s", p.accumulated_s}});
  j["points"] = std::move(points);
  return j;
}

}  // namespace zest
