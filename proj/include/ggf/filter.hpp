#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ggf/matrix.hpp"
#include "ggf/views.hpp"

namespace ggf {

// Polynomial graph filter f(P) = Σ_{k=1..K} c_k P^k. There is no identity
// term: coefficients[0] multiplies P itself.
struct FilterSpec {
  std::vector<double> coefficients;
  std::string preset_name;

  // Throws ParameterError unless K >= 1, all finite, at least one nonzero.
  void validate() const;
  Index order() const { return coefficients.size(); }
  // Σ c_k μ^k for an eigenvalue μ of P. In terms of the Laplacian
  // eigenvalue λ = 1 − μ this is the frequency response h(λ).
  double response(double mu) const;
  // Preset name when set, otherwise the comma-joined coefficients.
  std::string label() const;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

// Coefficients of the third-order preset. The default corresponds to
// h(λ) = 1 − λ³ (that is 3P − 3P² + P³), extending the second-order preset
// 2P − P² ⇔ 1 − λ². It is a documented default, not a tuned value.
inline constexpr std::array<double, 3> kDefaultCubic = {3.0, -3.0, 1.0};

// "linear" → [1], "second_order" → [2, −1], "cubic" → `cubic`.
FilterSpec preset(std::string_view name, const std::array<double, 3>& cubic = kDefaultCubic);

// Parses a preset name or a comma-separated coefficient list ("2,-1").
FilterSpec parse_filter(std::string_view text, const std::array<double, 3>& cubic = kDefaultCubic);

enum class FilterStrategy {
  kMaterialized,  // Σ c_k P^k stored explicitly; one mat-vec per signal
  kMatvecChain,   // K successive mat-vecs per signal
};

struct FilterOptions {
  std::optional<FilterStrategy> strategy;  // unset: choose automatically
  Index nnz_cap = 25'000'000;              // budget for materialized matrices
  Index max_materialized_items = 20'000;
};

class AppliedFilter {
 public:
  // Forms Σ c_k P^k by Horner's rule on sparse products. Raises ResourceError
  // when any intermediate would exceed `nnz_cap` stored entries.
  static AppliedFilter materialize(std::shared_ptr<const SimilarityGraph> graph, FilterSpec spec,
                                   Index nnz_cap = FilterOptions{}.nnz_cap);
  static AppliedFilter chain(std::shared_ptr<const SimilarityGraph> graph, FilterSpec spec);
  // Materializes small graphs, falling back to a chain when the graph is
  // large or the budget is exceeded.
  static AppliedFilter make(std::shared_ptr<const SimilarityGraph> graph, FilterSpec spec,
                            const FilterOptions& options = {});

  // signal · f(P)
  DenseRowd apply(const DenseRowd& signal) const;
  // Row-wise apply over a batch; rows are processed in parallel.
  DenseMatrixd apply_rows(const DenseMatrixd& signals) const;

  FilterStrategy strategy() const { return strategy_; }
  const FilterSpec& spec() const { return spec_; }
  const SimilarityGraph& graph() const { return *graph_; }
  // Throws if the filter is not materialized.
  const SparseMatrixd& matrix() const;

 private:
  AppliedFilter(std::shared_ptr<const SimilarityGraph> graph, FilterSpec spec, FilterStrategy strategy)
      : graph_(std::move(graph)), spec_(std::move(spec)), strategy_(strategy) {}

  std::shared_ptr<const SimilarityGraph> graph_;
  FilterSpec spec_;
  FilterStrategy strategy_;
  std::optional<SparseMatrixd> materialized_;
};

}  // namespace ggf
