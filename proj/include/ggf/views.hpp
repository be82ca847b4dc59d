#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ggf/dataset.hpp"
#include "ggf/matrix.hpp"

namespace ggf {

enum class View : std::uint8_t { kMember = 0, kGroup = 1, kUnified = 2 };
inline constexpr View kAllViews[] = {View::kMember, View::kGroup, View::kUnified};

std::string_view view_name(View v);
std::optional<View> parse_view(std::string_view name);

// Item-item similarity graph of one view: symmetric, nonnegative, |I| × |I|.
struct SimilarityGraph {
  View view = View::kMember;
  SparseMatrixd matrix;
  double s_used = 1.0;
  bool augmented_with_membership = false;

  Index n_items() const { return matrix.rows(); }
};

// Normalized co-occurrence between the first `n_items` columns of an
// interaction matrix, raised entrywise to `s`:
//   R̃ = D_r^{-1/2} R D_c^{-1/2},  P = (R̃ᵀR̃)[:n, :n] ∘ s
// Degrees come from the whole matrix; only the leading block of the gram
// matrix is formed.
SparseMatrixd normalized_item_graph(const SparseMatrixd& interactions, Index n_items, double s);

// R_u, optionally augmented with Mᵀ.
SimilarityGraph build_member_view(const Dataset& ds, double s, bool use_membership);
// R_g, optionally augmented with M.
SimilarityGraph build_group_view(const Dataset& ds, double s, bool use_membership);
// [R_g ; R_u].
SimilarityGraph build_unified_view(const Dataset& ds, double s);

SimilarityGraph build_view(const Dataset& ds, View view, double s, bool use_membership);

}  // namespace ggf
