#include "ggf/cache.hpp"

#include <cstring>

#include <fmt/core.h>

#include "ggf/matrix_io.hpp"

namespace ggf {

GraphCache::GraphCache(std::filesystem::path dir, const Dataset& ds)
    : dir_(std::move(dir)), ds_(ds), hash_(dataset_hash(ds)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError(fmt::format("cannot create cache directory {}: {}", dir_.string(), ec.message()));
}

std::filesystem::path GraphCache::path_for(View view, double s, bool use_membership) const {
  // The bit pattern of s keeps keys exact; the unified view ignores membership.
  std::uint64_t bits = 0;
  std::memcpy(&bits, &s, sizeof bits);
  const bool aug = view != View::kUnified && use_membership;
  return dir_ / fmt::format("{:016x}-{}-s{:016x}-m{}.ggfm", hash_, view_name(view), bits, aug ? 1 : 0);
}

std::shared_ptr<const SimilarityGraph> GraphCache::get(View view, double s, bool use_membership) {
  const auto path = path_for(view, s, use_membership);
  const bool aug = view != View::kUnified && use_membership;
  if (std::filesystem::exists(path)) {
    SparseMatrixd m = load_snapshot(path);
    if (m.rows() != ds_.n_items || m.cols() != ds_.n_items) {
      throw IoError(fmt::format("cached graph {} has the wrong shape", path.string()));
    }
    ++hits_;
    return std::make_shared<const SimilarityGraph>(SimilarityGraph{view, std::move(m), s, aug});
  }
  auto graph = std::make_shared<const SimilarityGraph>(build_view(ds_, view, s, use_membership));
  save_snapshot(path, graph->matrix);
  ++misses_;
  return graph;
}

GraphSource GraphCache::source() {
  return [this](View v, double s, bool m) { return get(v, s, m); };
}

}  // namespace ggf
