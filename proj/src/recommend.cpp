#include "ggf/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/core.h>

namespace ggf {

void ModelConfig::validate() const {
  auto unit = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw ParameterError(fmt::format("{} must lie in [0, 1], got {}", name, v));
    }
  };
  unit(alpha, "alpha");
  unit(beta, "beta");
  if (alpha + beta > 1.0 + 1e-12) {
    throw ParameterError(fmt::format("alpha + beta must not exceed 1 ({} + {})", alpha, beta));
  }
  for (const View v : kAllViews) {
    const double sv = s_for(v);
    if (!(sv > 0.0) || !std::isfinite(sv)) {
      throw ParameterError(fmt::format("s for the {} view must be > 0, got {}", view_name(v), sv));
    }
    filter_for(v).validate();
  }
  if (std::none_of(enabled.begin(), enabled.end(), [](bool b) { return b; })) {
    throw ParameterError("at least one view must be enabled");
  }
  (void)weights();
}

double ModelConfig::s_for(View v) const {
  const auto& o = s_override[static_cast<int>(v)];
  return o ? *o : s;
}

const FilterSpec& ModelConfig::filter_for(View v) const {
  switch (v) {
    case View::kMember: return filter_u;
    case View::kGroup: return filter_g;
    case View::kUnified: return filter_uni;
  }
  throw ParameterError("unknown view");
}

FilterSpec& ModelConfig::filter_for(View v) {
  return const_cast<FilterSpec&>(std::as_const(*this).filter_for(v));
}

std::array<double, 3> ModelConfig::weights() const {
  std::array<double, 3> w = {std::max(0.0, 1.0 - alpha - beta), alpha, beta};
  if (std::all_of(enabled.begin(), enabled.end(), [](bool b) { return b; })) return w;
  double total = 0.0;
  for (int v = 0; v < 3; ++v) {
    if (!enabled[v]) w[v] = 0.0;
    total += w[v];
  }
  if (total <= 0.0) {
    throw ParameterError(fmt::format(
        "every enabled view has zero weight (alpha={}, beta={}); nothing left to renormalize", alpha, beta));
  }
  for (double& x : w) x /= total;
  return w;
}

std::optional<Ablation> parse_ablation(std::string_view name) {
  if (name.starts_with("group-gf-")) name.remove_prefix(9);
  if (name == "none") return Ablation::kNone;
  if (name == "m") return Ablation::kNoMemberView;
  if (name == "g") return Ablation::kNoGroupView;
  if (name == "uni") return Ablation::kNoUnifiedView;
  if (name == "a") return Ablation::kNoMembership;
  return std::nullopt;
}

std::string_view ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "none";
    case Ablation::kNoMemberView: return "m";
    case Ablation::kNoGroupView: return "g";
    case Ablation::kNoUnifiedView: return "uni";
    case Ablation::kNoMembership: return "a";
  }
  return "?";
}

ModelConfig apply_ablation(ModelConfig cfg, Ablation a) {
  switch (a) {
    case Ablation::kNone: break;
    case Ablation::kNoMemberView: cfg.enabled[static_cast<int>(View::kMember)] = false; break;
    case Ablation::kNoGroupView: cfg.enabled[static_cast<int>(View::kGroup)] = false; break;
    case Ablation::kNoUnifiedView: cfg.enabled[static_cast<int>(View::kUnified)] = false; break;
    case Ablation::kNoMembership: cfg.use_membership = false; break;
  }
  return cfg;
}

ViewGraphs build_graphs(const Dataset& ds, const ModelConfig& cfg, const GraphSource& source) {
  cfg.validate();
  const auto w = cfg.weights();
  ViewGraphs graphs;
  for (const View v : kAllViews) {
    if (w[static_cast<int>(v)] == 0.0) continue;
    graphs[static_cast<int>(v)] =
        source ? source(v, cfg.s_for(v), cfg.use_membership)
               : std::make_shared<const SimilarityGraph>(build_view(ds, v, cfg.s_for(v), cfg.use_membership));
  }
  return graphs;
}

Model build_model(const ViewGraphs& graphs, const ModelConfig& cfg, const FilterOptions& options) {
  cfg.validate();
  const auto w = cfg.weights();
  Model model{cfg, {}};
  for (const View v : kAllViews) {
    const int i = static_cast<int>(v);
    if (w[i] == 0.0) continue;
    const auto& g = graphs[i];
    if (!g) throw ParameterError(fmt::format("no graph supplied for the {} view", view_name(v)));
    const bool wants_aug = v != View::kUnified && cfg.use_membership;
    if (g->view != v || g->s_used != cfg.s_for(v) || g->augmented_with_membership != wants_aug) {
      throw ParameterError(fmt::format("{} graph was built with different settings", view_name(v)));
    }
    model.filters[i] = AppliedFilter::make(g, cfg.filter_for(v), options);
  }
  return model;
}

Model build_model(const Dataset& ds, const ModelConfig& cfg, const FilterOptions& options) {
  return build_model(build_graphs(ds, cfg), cfg, options);
}

ViewScores view_scores(const Dataset& ds, const Model& model, Role role, Index subject) {
  const DenseRowd signal = ds.signal(role, subject);
  ViewScores out;
  for (int v = 0; v < 3; ++v) {
    if (model.filters[v]) out[v] = model.filters[v]->apply(signal);
  }
  return out;
}

DenseRowd combine_views(const std::array<double, 3>& weights, const ViewScores& rows) {
  DenseRowd out;
  for (int v = 0; v < 3; ++v) {
    if (weights[v] == 0.0) continue;
    if (!rows[v]) throw ParameterError("missing scores for a weighted view");
    if (out.size() == 0) out = DenseRowd::Zero(rows[v]->size());
    out += weights[v] * *rows[v];
  }
  return out;
}

void mask_training_items(const Dataset& ds, ScoreRow& row) {
  const auto& tr = ds.train(row.role);
  for (const ColIndex c : tr.row_cols(row.subject)) {
    row.scores[c] = kMaskedScore;
    row.masked.push_back(c);
  }
}

ScoreRow score_subject(const Dataset& ds, const Model& model, Role role, Index subject) {
  if (subject >= ds.n_subjects(role)) {
    throw IndexError(fmt::format("{} {} out of range", role == Role::kGroup ? "group" : "member", subject));
  }
  ScoreRow row{role, subject, combine_views(model.config.weights(), view_scores(ds, model, role, subject)), {}};
  if (model.config.mask_seen) mask_training_items(ds, row);
  return row;
}

TopK top_k(const ScoreRow& row, Index k, std::span<const Index> among) {
  if (k < 1) throw ParameterError("k must be >= 1");
  std::vector<Index> pool;
  auto consider = [&](Index i) {
    if (row.scores[static_cast<Eigen::Index>(i)] != kMaskedScore) pool.push_back(i);
  };
  if (among.empty()) {
    for (Index i = 0; i < static_cast<Index>(row.scores.size()); ++i) consider(i);
  } else {
    for (const Index i : among) {
      if (i >= static_cast<Index>(row.scores.size())) throw IndexError("candidate item out of range");
      consider(i);
    }
  }
  TopK out;
  out.truncated = pool.size() < k;
  const Index n = std::min<Index>(k, pool.size());
  auto cmp = [&](Index a, Index b) { return ranks_before(row.scores, a, b); };
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n), pool.end(), cmp);
  out.items.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
  for (const Index i : out.items) out.scores.push_back(row.scores[static_cast<Eigen::Index>(i)]);
  return out;
}

}  // namespace ggf
