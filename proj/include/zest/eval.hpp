#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zest/index.hpp"
#include "zest/json_io.hpp"
#include "zest/space.hpp"

namespace zest {

/// How a tuning policy spends cluster time: a one-off tuning cost, then a
/// fixed runtime per execution. Policies that change configuration on every
/// run (an optimizer's study) give the per-run costs in `schedule` instead;
/// once the schedule runs out every further run costs per_exec_s.
struct PolicyCost {
  std::string policy;
  double upfront_s = 0.0;
  double per_exec_s = 0.0;
  std::vector<double> schedule;

  /// Throws std::invalid_argument unless upfront_s >= 0, per_exec_s > 0 and
  /// every schedule entry is positive.
  void validate() const;
};

struct CostPoint {
  int n = 0;
  double accumulated_s = 0.0;
};

struct CostCurve {
  std::string policy;
  std::vector<CostPoint> points;  // n = 1 .. n_max
};

/// Fixed policies: upfront + n * per_exec. Schedule policies: upfront plus
/// the first n schedule entries, continuing at per_exec_s beyond them.
CostCurve accumulated_cost(const PolicyCost& p, int n_max);

/// Smallest n with upfront + n * t_method < n * t_zest, or nullopt ("never")
/// when t_method >= t_zest.
std::optional<int> break_even(double upfront_s, double t_method_s, double t_zest_s);

double speedup(double default_s, double tuned_s);

struct Retention {
  double ratio_direct = 0.0;                 // t_ref / t_candidate
  std::optional<double> ratio_improvement;  // (t_default - t_candidate) / (t_default - t_ref)
};

/// Both readings of "share of the improvement kept". ratio_improvement is
/// absent without a default runtime or when t_default == t_ref.
Retention improvement_retention(double t_ref_s, double t_candidate_s, std::optional<double> t_default_s = std::nullopt);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct ParamHistogram {
  Param param;
  std::vector<HistogramBin> bins;
};

/// Optimal-value histograms over each parameter's profile range. The range
/// [lo, hi + 1) is cut into `bins` equal slices so every integer value falls
/// in exactly one bin. Throws EmptyIndex, std::invalid_argument for bins < 1.
std::vector<ParamHistogram> param_histograms(const RetrievalIndex& index, const ConfigSpace& space, int bins);

/// param,bin_lo,bin_hi,count
std::string histograms_csv(std::span<const ParamHistogram> histograms);
ordered_json histograms_json(std::span<const ParamHistogram> histograms);

struct TotalRow {
  std::string policy;
  std::string dataset;
  double total_s = 0.0;
};

struct BreakEvenRow {
  std::string policy;
  std::optional<int> n;  // nullopt: never
};

/// policy,dataset,total_s
std::string totals_csv(std::span<const TotalRow> rows);
/// policy,n_or_never
std::string break_even_csv(std::span<const BreakEvenRow> rows);
/// n followed by one column per curve.
std::string curves_csv(std::span<const CostCurve> curves);

ordered_json to_json(const CostCurve& curve);

}  // namespace zest
