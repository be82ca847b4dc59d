#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "ggf/dataset.hpp"
#include "ggf/recommend.hpp"
#include "ggf/views.hpp"

namespace ggf {

// Write-once on-disk store of view graphs keyed by
// (dataset hash, view, s, membership flag). Files are published by atomic
// rename, so concurrent processes sharing a directory never see partial data.
class GraphCache {
 public:
  GraphCache(std::filesystem::path dir, const Dataset& ds);

  std::shared_ptr<const SimilarityGraph> get(View view, double s, bool use_membership);
  GraphSource source();

  std::filesystem::path path_for(View view, double s, bool use_membership) const;
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::filesystem::path dir_;
  const Dataset& ds_;
  std::uint64_t hash_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace ggf
