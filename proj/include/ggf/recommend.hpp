#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ggf/dataset.hpp"
#include "ggf/filter.hpp"
#include "ggf/views.hpp"

namespace ggf {

// Everything that determines a scoring function. Scores are
//   s = r ((1 − α − β) f_u(P_u) + α f_g(P_g) + β f_uni(P_uni))
// where r is the subject's binary training row.
struct ModelConfig {
  double alpha = 0.0;
  double beta = 0.0;
  double s = 1.0;
  // Per-view overrides of s; unset views use `s`.
  std::array<std::optional<double>, 3> s_override{};
  FilterSpec filter_u = preset("linear");
  FilterSpec filter_g = preset("linear");
  FilterSpec filter_uni = preset("linear");
  bool use_membership = true;
  std::array<bool, 3> enabled = {true, true, true};
  bool mask_seen = false;

  void validate() const;
  double s_for(View v) const;
  const FilterSpec& filter_for(View v) const;
  FilterSpec& filter_for(View v);
  bool view_enabled(View v) const { return enabled[static_cast<int>(v)]; }
  // Aggregation weights indexed by View. Disabled views get weight 0 and the
  // remaining weights are rescaled to sum to 1.
  std::array<double, 3> weights() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Variants that drop one ingredient of the full model.
enum class Ablation {
  kNone,
  kNoMemberView,   // "m"
  kNoGroupView,    // "g"
  kNoUnifiedView,  // "uni"
  kNoMembership,   // "a": no member-group augmentation
};

std::optional<Ablation> parse_ablation(std::string_view name);
std::string_view ablation_name(Ablation a);
ModelConfig apply_ablation(ModelConfig cfg, Ablation a);

// Graphs indexed by View; null where a view is not needed.
using ViewGraphs = std::array<std::shared_ptr<const SimilarityGraph>, 3>;

// Produces the graph of one view; lets callers serve graphs from a cache.
using GraphSource = std::function<std::shared_ptr<const SimilarityGraph>(View, double s, bool use_membership)>;

// Builds the graphs of every view with nonzero weight.
ViewGraphs build_graphs(const Dataset& ds, const ModelConfig& cfg, const GraphSource& source = {});

struct Model {
  ModelConfig config;
  std::array<std::optional<AppliedFilter>, 3> filters;  // engaged iff weight > 0
};

Model build_model(const Dataset& ds, const ModelConfig& cfg, const FilterOptions& options = {});
// Reuses prebuilt graphs; they must match cfg's s and membership settings.
Model build_model(const ViewGraphs& graphs, const ModelConfig& cfg, const FilterOptions& options = {});

inline constexpr double kMaskedScore = -std::numeric_limits<double>::infinity();

struct ScoreRow {
  Role role = Role::kGroup;
  Index subject = 0;
  DenseRowd scores;
  std::vector<Index> masked;  // carry kMaskedScore
};

// Per-view filtered signals, before weighting; disengaged where weight is 0.
using ViewScores = std::array<std::optional<DenseRowd>, 3>;

ViewScores view_scores(const Dataset& ds, const Model& model, Role role, Index subject);
// Σ_v w_v · rows_v over views with w_v ≠ 0, in View order.
DenseRowd combine_views(const std::array<double, 3>& weights, const ViewScores& rows);
// Sets the subject's training items to kMaskedScore.
void mask_training_items(const Dataset& ds, ScoreRow& row);

ScoreRow score_subject(const Dataset& ds, const Model& model, Role role, Index subject);
inline ScoreRow score_group(const Dataset& ds, const Model& model, Index g) {
  return score_subject(ds, model, Role::kGroup, g);
}
inline ScoreRow score_member(const Dataset& ds, const Model& model, Index u) {
  return score_subject(ds, model, Role::kMember, u);
}

struct TopK {
  std::vector<Index> items;
  std::vector<double> scores;
  bool truncated = false;  // fewer than k unmasked items were available
};

// Highest-scoring unmasked items, ties broken by ascending item index. When
// `among` is non-empty only those items are ranked.
TopK top_k(const ScoreRow& row, Index k, std::span<const Index> among = {});

// Strict ranking order shared by top_k and the metrics.
inline bool ranks_before(const DenseRowd& scores, Index a, Index b) {
  const double sa = scores[static_cast<Eigen::Index>(a)];
  const double sb = scores[static_cast<Eigen::Index>(b)];
  return sa > sb || (sa == sb && a < b);
}

}  // namespace ggf
