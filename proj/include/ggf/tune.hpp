#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ggf/dataset.hpp"
#include "ggf/filter.hpp"
#include "ggf/metrics.hpp"
#include "ggf/recommend.hpp"

namespace ggf {

struct TuneGrid {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> ss;
  // Filter choices per view, indexed by View.
  std::array<std::vector<FilterSpec>, 3> filters;

  // α, β ∈ {0, 0.1, …, 1}; s ∈ {0.3, 0.5, 0.7, 1, 1.5, 2}; linear or
  // second_order on every view.
  static TuneGrid defaults();
  static TuneGrid singleton(const ModelConfig& cfg);
  void validate() const;
};

enum class TargetMetric { kHr, kNdcg };

struct TuneOptions {
  TargetMetric metric = TargetMetric::kNdcg;
  Index k = 10;
  std::vector<Index> report_ks = {10};
  Role role = Role::kGroup;
  FilterOptions filter;
  // Seeds the choice of the grid point re-evaluated from scratch.
  std::uint64_t seed = 0;
  bool verify_cache = true;
  // Optional graph provider; graphs are built in memory when unset.
  GraphSource graphs;
};

struct GridPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double s = 1.0;
  std::array<std::size_t, 3> filter_index{};  // into TuneGrid::filters

  auto operator<=>(const GridPoint&) const = default;
};

struct TraceRow {
  GridPoint point;
  ModelConfig config;
  EvalReport report;
  double ms = 0.0;
};

struct TuneResult {
  ModelConfig best;
  EvalReport best_report;
  std::size_t best_index = 0;
  std::vector<TraceRow> trace;  // lexicographic order of grid points
  bool cache_checked = false;
  bool cache_check_passed = false;
  std::size_t cache_check_index = 0;
};

// Evaluates every feasible grid point on the validation split and returns the
// best one; ties go to the lexicographically first point. `base` supplies the
// settings the grid does not vary (membership augmentation, enabled views,
// masking, s overrides are ignored).
TuneResult grid_search(const Dataset& ds, const TuneGrid& grid, const ModelConfig& base,
                       const TuneOptions& options = {});

// Columns: alpha beta s preset_u preset_g preset_uni hr@k ndcg@k ms
std::string trace_to_tsv(const TuneResult& result, Index k);

}  // namespace ggf
