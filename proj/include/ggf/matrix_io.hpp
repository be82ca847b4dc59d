#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "ggf/matrix.hpp"

namespace ggf {

// Binary snapshot, all fields little-endian:
//   "GGFM" | version u16 | n_rows u64 | n_cols u64 | nnz u64 |
//   row_ptr (n_rows + 1) × u64 | col_idx nnz × u64 | values nnz × f64
inline constexpr std::uint16_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const SparseMatrixd& m);
SparseMatrixd read_snapshot(std::istream& in);

// Writes to a temporary sibling and renames it into place.
void save_snapshot(const std::filesystem::path& path, const SparseMatrixd& m);
SparseMatrixd load_snapshot(const std::filesystem::path& path);

// 64-bit FNV-1a, stable across platforms and runs.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n);
  template <typename T>
  void update_value(const T& v) { update(&v, sizeof(T)); }
  void update(const SparseMatrixd& m);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace ggf
