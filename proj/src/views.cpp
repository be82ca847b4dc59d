#include "ggf/views.hpp"

#include <fmt/core.h>

namespace ggf {

std::string_view view_name(View v) {
  switch (v) {
    case View::kMember: return "member";
    case View::kGroup: return "group";
    case View::kUnified: return "unified";
  }
  return "?";
}

std::optional<View> parse_view(std::string_view name) {
  if (name == "member" || name == "u") return View::kMember;
  if (name == "group" || name == "g") return View::kGroup;
  if (name == "unified" || name == "uni") return View::kUnified;
  return std::nullopt;
}

SparseMatrixd normalized_item_graph(const SparseMatrixd& interactions, Index n_items, double s) {
  if (!(s > 0.0)) throw ParameterError(fmt::format("adjustment exponent s must be > 0, got {}", s));
  if (n_items > interactions.cols()) throw DimensionError("item block wider than interaction matrix");
  const SparseMatrixd normalized =
      scale_bilateral(interactions, row_sums(interactions), col_sums(interactions));
  const SparseMatrixd items = n_items == interactions.cols()
                                  ? normalized
                                  : submatrix(normalized, {0, normalized.rows()}, {0, n_items});
  return hadamard_pow(gram(items), s);
}

SimilarityGraph build_member_view(const Dataset& ds, double s, bool use_membership) {
  const SparseMatrixd augmented =
      use_membership ? concat_h(ds.member_item, transpose(ds.membership)) : ds.member_item;
  return {View::kMember, normalized_item_graph(augmented, ds.n_items, s), s, use_membership};
}

SimilarityGraph build_group_view(const Dataset& ds, double s, bool use_membership) {
  const SparseMatrixd augmented =
      use_membership ? concat_h(ds.group_item, ds.membership) : ds.group_item;
  return {View::kGroup, normalized_item_graph(augmented, ds.n_items, s), s, use_membership};
}

SimilarityGraph build_unified_view(const Dataset& ds, double s) {
  const SparseMatrixd stacked = concat_v(ds.group_item, ds.member_item);
  return {View::kUnified, normalized_item_graph(stacked, ds.n_items, s), s, false};
}

SimilarityGraph build_view(const Dataset& ds, View view, double s, bool use_membership) {
  switch (view) {
    case View::kMember: return build_member_view(ds, s, use_membership);
    case View::kGroup: return build_group_view(ds, s, use_membership);
    case View::kUnified: return build_unified_view(ds, s);
  }
  throw ParameterError("unknown view");
}

}  // namespace ggf
