#include "ggf/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace ggf {
namespace {

constexpr std::array<char, 4> kMagic = {'G', 'G', 'F', 'M'};

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ParseError("truncated matrix snapshot");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(std::ostream& out, const SparseMatrixd& m) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kSnapshotVersion);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint64_t>(out, m.cols());
  put_le<std::uint64_t>(out, m.nnz());
  for (const Index p : m.row_ptr()) put_le<std::uint64_t>(out, p);
  for (const ColIndex c : m.col_idx()) put_le<std::uint64_t>(out, c);
  for (const double v : m.values()) put_le<double>(out, v);
  if (!out) throw IoError("failed to write matrix snapshot");
}

SparseMatrixd read_snapshot(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("not a matrix snapshot (bad magic)");
  }
  const auto version = get_le<std::uint16_t>(in);
  if (version != kSnapshotVersion) {
    throw ParseError("unsupported snapshot version " + std::to_string(version));
  }
  const auto rows = get_le<std::uint64_t>(in);
  const auto cols = get_le<std::uint64_t>(in);
  const auto nnz = get_le<std::uint64_t>(in);
  std::vector<Index> row_ptr(rows + 1);
  for (auto& p : row_ptr) p = get_le<std::uint64_t>(in);
  std::vector<ColIndex> col_idx(nnz);
  for (auto& c : col_idx) {
    const auto v = get_le<std::uint64_t>(in);
    if (v >= cols) throw ParseError("snapshot column index out of range");
    c = static_cast<ColIndex>(v);
  }
  std::vector<double> values(nnz);
  for (auto& v : values) v = get_le<double>(in);
  try {
    return SparseMatrixd::from_csr(rows, cols, std::move(row_ptr), std::move(col_idx),
                                   std::move(values));
  } catch (const Error& e) {
    throw ParseError(std::string("invalid snapshot contents: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& path, const SparseMatrixd& m) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    write_snapshot(out, m);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

SparseMatrixd load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_snapshot(in);
}

void Fnv1a::update(const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    state_ ^= bytes[i];
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::update(const SparseMatrixd& m) {
  update_value<std::uint64_t>(m.rows());
  update_value<std::uint64_t>(m.cols());
  for (const Index p : m.row_ptr()) update_value<std::uint64_t>(p);
  for (const ColIndex c : m.col_idx()) update_value<std::uint64_t>(c);
  for (const double v : m.values()) update_value<double>(v);
}

}  // namespace ggf
