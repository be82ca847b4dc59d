#pragma once

// Compressed sparse row matrices and the deterministic kernels the
// recommendation pipeline is built from. Dense work goes through Eigen.
//
// All kernels are pure. Parallel kernels partition output rows; every output
// row is accumulated in a fixed order, so results are bit-identical for any
// thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggf/error.hpp"
#include "ggf/parallel.hpp"

namespace ggf {

using Index = std::size_t;
using ColIndex = std::uint32_t;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseRow = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
// Row or column sums of a matrix.
template <typename Scalar>
using DegreeVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Half-open index interval [begin, end).
struct Range {
  Index begin = 0;
  Index end = 0;
  Index size() const { return end - begin; }
};

template <typename Scalar>
struct Triplet {
  Index row;
  Index col;
  Scalar value;
};

enum class Duplicates {
  kSum,    // values of repeated (row, col) pairs are added
  kKeep,   // set semantics: the first value is kept, the rest dropped
  kError,  // repeated pairs raise ValidationError
};

template <typename Scalar>
class SparseMatrix {
 public:
  using value_type = Scalar;

  SparseMatrix() : row_ptr_(1, 0) {}
  SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {
    check_col_capacity(cols);
  }

  // Adopts CSR arrays after validating them. Explicit zeros are pruned.
  static SparseMatrix from_csr(Index rows, Index cols, std::vector<Index> row_ptr,
                               std::vector<ColIndex> col_idx, std::vector<Scalar> values) {
    check_col_capacity(cols);
    if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 || row_ptr.back() != col_idx.size() ||
        col_idx.size() != values.size()) {
      throw DimensionError("inconsistent CSR array lengths");
    }
    for (Index r = 0; r < rows; ++r) {
      if (row_ptr[r] > row_ptr[r + 1]) throw DimensionError("row pointers must be nondecreasing");
      for (Index p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
        if (col_idx[p] >= cols) throw DimensionError("column index out of range");
        if (p > row_ptr[r] && col_idx[p] <= col_idx[p - 1]) {
          throw DimensionError("column indices must be strictly increasing within a row");
        }
        if (!std::isfinite(values[p])) throw DomainError("non-finite matrix value");
      }
    }
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.values_ = std::move(values);
    m.prune_zeros();
    return m;
  }

  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet<Scalar>> entries,
                                    Duplicates policy = Duplicates::kSum,
                                    std::size_t* duplicates_seen = nullptr) {
    check_col_capacity(cols);
    for (const auto& e : entries) {
      if (e.row >= rows || e.col >= cols) throw IndexError("triplet index out of range");
      if (!std::isfinite(e.value)) throw DomainError("non-finite matrix value");
    }
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Index> row_ptr(rows + 1, 0);
    std::vector<ColIndex> col_idx;
    std::vector<Scalar> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    std::size_t dups = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
        ++dups;
        if (policy == Duplicates::kError) {
          throw ValidationError("duplicate entry (" + std::to_string(e.row) + ", " +
                                std::to_string(e.col) + ")");
        }
        if (policy == Duplicates::kSum) values.back() += e.value;
        continue;
      }
      col_idx.push_back(static_cast<ColIndex>(e.col));
      values.push_back(e.value);
      ++row_ptr[e.row + 1];
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    if (duplicates_seen != nullptr) *duplicates_seen = dups;
    return from_csr(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  static SparseMatrix identity(Index n) {
    std::vector<Index> row_ptr(n + 1);
    std::iota(row_ptr.begin(), row_ptr.end(), Index{0});
    std::vector<ColIndex> col_idx(n);
    std::iota(col_idx.begin(), col_idx.end(), ColIndex{0});
    return from_csr(n, n, std::move(row_ptr), std::move(col_idx), std::vector<Scalar>(n, Scalar(1)));
  }

  template <typename Derived>
  static SparseMatrix from_dense(const Eigen::MatrixBase<Derived>& dense) {
    const auto rows = static_cast<Index>(dense.rows());
    const auto cols = static_cast<Index>(dense.cols());
    std::vector<Index> row_ptr(rows + 1, 0);
    std::vector<ColIndex> col_idx;
    std::vector<Scalar> values;
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        const Scalar v = dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (v != Scalar(0)) {
          col_idx.push_back(static_cast<ColIndex>(c));
          values.push_back(v);
        }
      }
      row_ptr[r + 1] = col_idx.size();
    }
    return from_csr(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return values_.size(); }

  std::span<const ColIndex> row_cols(Index r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const Scalar> row_values(Index r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  Index row_nnz(Index r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<ColIndex>& col_idx() const { return col_idx_; }
  const std::vector<Scalar>& values() const { return values_; }

  Scalar coeff(Index r, Index c) const {
    if (r >= rows_ || c >= cols_) throw IndexError("coefficient index out of range");
    const auto cols = row_cols(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<ColIndex>(c));
    if (it == cols.end() || *it != c) return Scalar(0);
    return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
  }

  DenseMatrix<Scalar> to_dense() const {
    DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(static_cast<Eigen::Index>(rows_),
                                                        static_cast<Eigen::Index>(cols_));
    for (Index r = 0; r < rows_; ++r) {
      const auto cols = row_cols(r);
      const auto vals = row_values(r);
      for (std::size_t p = 0; p < cols.size(); ++p) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[p])) = vals[p];
      }
    }
    return out;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_ptr_ == b.row_ptr_ &&
           a.col_idx_ == b.col_idx_ && a.values_ == b.values_;
  }

 private:
  static void check_col_capacity(Index cols) {
    if (cols > std::numeric_limits<ColIndex>::max()) {
      throw ResourceError("column count exceeds 32-bit column index capacity");
    }
  }

  void prune_zeros() {
    if (std::find(values_.begin(), values_.end(), Scalar(0)) == values_.end()) return;
    Index out = 0;
    Index start = 0;
    for (Index r = 0; r < rows_; ++r) {
      const Index end = row_ptr_[r + 1];
      for (Index p = start; p < end; ++p) {
        if (values_[p] != Scalar(0)) {
          col_idx_[out] = col_idx_[p];
          values_[out] = values_[p];
          ++out;
        }
      }
      start = end;
      row_ptr_[r + 1] = out;
    }
    col_idx_.resize(out);
    values_.resize(out);
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_;
  std::vector<ColIndex> col_idx_;
  std::vector<Scalar> values_;
};

using SparseMatrixd = SparseMatrix<double>;
using DenseMatrixd = DenseMatrix<double>;
using DenseRowd = DenseRow<double>;
using DegreeVectord = DegreeVector<double>;

namespace detail {

// Per-thread scatter buffer for row-wise products. `touched` lists the
// columns written since the last gather.
template <typename Scalar>
struct ScatterBuffer {
  std::vector<Scalar> acc;
  std::vector<char> used;
  std::vector<ColIndex> touched;

  explicit ScatterBuffer(Index width = 0) : acc(width, Scalar(0)), used(width, 0) {}

  void add(ColIndex c, Scalar v) {
    if (!used[c]) {
      used[c] = 1;
      touched.push_back(c);
    }
    acc[c] += v;
  }

  // Emits sorted (col, value) pairs, skipping exact zeros, and resets.
  template <typename Out>
  void gather(Out&& emit) {
    std::sort(touched.begin(), touched.end());
    for (const ColIndex c : touched) {
      if (acc[c] != Scalar(0)) emit(c, acc[c]);
      acc[c] = Scalar(0);
      used[c] = 0;
    }
    touched.clear();
  }
};

// Assembles a matrix from independently computed rows.
template <typename Scalar>
SparseMatrix<Scalar> assemble_rows(Index rows, Index cols,
                                   std::vector<std::vector<ColIndex>>& row_cols,
                                   std::vector<std::vector<Scalar>>& row_vals) {
  std::vector<Index> row_ptr(rows + 1, 0);
  for (Index r = 0; r < rows; ++r) row_ptr[r + 1] = row_ptr[r] + row_cols[r].size();
  std::vector<ColIndex> col_idx(row_ptr.back());
  std::vector<Scalar> values(row_ptr.back());
  for (Index r = 0; r < rows; ++r) {
    std::copy(row_cols[r].begin(), row_cols[r].end(), col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]));
    std::copy(row_vals[r].begin(), row_vals[r].end(), values.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]));
    std::vector<ColIndex>().swap(row_cols[r]);
    std::vector<Scalar>().swap(row_vals[r]);
  }
  return SparseMatrix<Scalar>::from_csr(rows, cols, std::move(row_ptr), std::move(col_idx),
                                        std::move(values));
}

}  // namespace detail

template <typename Scalar>
SparseMatrix<Scalar> transpose(const SparseMatrix<Scalar>& m) {
  std::vector<Index> row_ptr(m.cols() + 1, 0);
  for (const ColIndex c : m.col_idx()) ++row_ptr[c + 1];
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  std::vector<Index> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<ColIndex> col_idx(m.nnz());
  std::vector<Scalar> values(m.nnz());
  for (Index r = 0; r < m.rows(); ++r) {
    const auto cols = m.row_cols(r);
    const auto vals = m.row_values(r);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      const Index dst = next[cols[p]]++;
      col_idx[dst] = static_cast<ColIndex>(r);
      values[dst] = vals[p];
    }
  }
  return SparseMatrix<Scalar>::from_csr(m.cols(), m.rows(), std::move(row_ptr), std::move(col_idx),
                                        std::move(values));
}

// [a | b]
template <typename Scalar>
SparseMatrix<Scalar> concat_h(const SparseMatrix<Scalar>& a, const SparseMatrix<Scalar>& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_h: row counts differ (" + std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()) + ")");
  }
  std::vector<Index> row_ptr(a.rows() + 1, 0);
  std::vector<ColIndex> col_idx;
  std::vector<Scalar> values;
  col_idx.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  const auto shift = static_cast<ColIndex>(a.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    const auto ac = a.row_cols(r);
    const auto av = a.row_values(r);
    col_idx.insert(col_idx.end(), ac.begin(), ac.end());
    values.insert(values.end(), av.begin(), av.end());
    const auto bc = b.row_cols(r);
    const auto bv = b.row_values(r);
    for (const ColIndex c : bc) col_idx.push_back(c + shift);
    values.insert(values.end(), bv.begin(), bv.end());
    row_ptr[r + 1] = col_idx.size();
  }
  return SparseMatrix<Scalar>::from_csr(a.rows(), a.cols() + b.cols(), std::move(row_ptr),
                                        std::move(col_idx), std::move(values));
}

// [a ; b]
template <typename Scalar>
SparseMatrix<Scalar> concat_v(const SparseMatrix<Scalar>& a, const SparseMatrix<Scalar>& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("concat_v: column counts differ (" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.cols()) + ")");
  }
  std::vector<Index> row_ptr(a.row_ptr());
  row_ptr.reserve(a.rows() + b.rows() + 1);
  for (Index r = 1; r <= b.rows(); ++r) row_ptr.push_back(a.nnz() + b.row_ptr()[r]);
  std::vector<ColIndex> col_idx(a.col_idx());
  col_idx.insert(col_idx.end(), b.col_idx().begin(), b.col_idx().end());
  std::vector<Scalar> values(a.values());
  values.insert(values.end(), b.values().begin(), b.values().end());
  return SparseMatrix<Scalar>::from_csr(a.rows() + b.rows(), a.cols(), std::move(row_ptr),
                                        std::move(col_idx), std::move(values));
}

template <typename Scalar>
DegreeVector<Scalar> row_sums(const SparseMatrix<Scalar>& m) {
  DegreeVector<Scalar> out = DegreeVector<Scalar>::Zero(static_cast<Eigen::Index>(m.rows()));
  for (Index r = 0; r < m.rows(); ++r) {
    Scalar s(0);
    for (const Scalar v : m.row_values(r)) s += v;
    out[static_cast<Eigen::Index>(r)] = s;
  }
  return out;
}

template <typename Scalar>
DegreeVector<Scalar> col_sums(const SparseMatrix<Scalar>& m) {
  DegreeVector<Scalar> out = DegreeVector<Scalar>::Zero(static_cast<Eigen::Index>(m.cols()));
  for (Index p = 0; p < m.nnz(); ++p) out[m.col_idx()[p]] += m.values()[p];
  return out;
}

// d^{-1/2}, with zero degrees mapped to zero.
template <typename Scalar>
DegreeVector<Scalar> inv_sqrt(const DegreeVector<Scalar>& degrees) {
  DegreeVector<Scalar> out(degrees.size());
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    const Scalar d = degrees[i];
    if (d < Scalar(0) || !std::isfinite(d)) throw DomainError("degrees must be finite and nonnegative");
    out[i] = d > Scalar(0) ? Scalar(1) / std::sqrt(d) : Scalar(0);
  }
  return out;
}

// diag(left)^{-1/2} · m · diag(right)^{-1/2}
template <typename Scalar>
SparseMatrix<Scalar> scale_bilateral(const SparseMatrix<Scalar>& m, const DegreeVector<Scalar>& left,
                                     const DegreeVector<Scalar>& right) {
  if (static_cast<Index>(left.size()) != m.rows() || static_cast<Index>(right.size()) != m.cols()) {
    throw DimensionError("scale_bilateral: degree vector lengths do not match matrix shape");
  }
  const DegreeVector<Scalar> lf = inv_sqrt(left);
  const DegreeVector<Scalar> rf = inv_sqrt(right);
  std::vector<Scalar> values(m.values());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index p = m.row_ptr()[r]; p < m.row_ptr()[r + 1]; ++p) {
      values[p] = values[p] * lf[static_cast<Eigen::Index>(r)] * rf[m.col_idx()[p]];
    }
  }
  return SparseMatrix<Scalar>::from_csr(m.rows(), m.cols(), m.row_ptr(), m.col_idx(),
                                        std::move(values));
}

// Symbolic pass of a·b: nnz of each output row (before cancellation).
template <typename Scalar>
std::vector<Index> spmm_row_nnz(const SparseMatrix<Scalar>& a, const SparseMatrix<Scalar>& b) {
  if (a.cols() != b.rows()) throw DimensionError("spmm: inner dimensions differ");
  std::vector<Index> counts(a.rows(), 0);
  std::vector<std::vector<Index>> marks(static_cast<std::size_t>(max_threads()));
  parallel_for(a.rows(), [&](Index r, int t) {
    auto& mark = marks[static_cast<std::size_t>(t)];
    if (mark.size() != b.cols()) mark.assign(b.cols(), std::numeric_limits<Index>::max());
    Index n = 0;
    for (const ColIndex k : a.row_cols(r)) {
      for (const ColIndex c : b.row_cols(k)) {
        if (mark[c] != r) {
          mark[c] = r;
          ++n;
        }
      }
    }
    counts[r] = n;
  });
  return counts;
}

template <typename Scalar>
Index spmm_nnz(const SparseMatrix<Scalar>& a, const SparseMatrix<Scalar>& b) {
  const auto counts = spmm_row_nnz(a, b);
  return std::accumulate(counts.begin(), counts.end(), Index{0});
}

// a·b by row-wise (Gustavson) accumulation. Row r of the result sums
// a[r,k]·b[k,:] in ascending k.
template <typename Scalar>
SparseMatrix<Scalar> spmm(const SparseMatrix<Scalar>& a, const SparseMatrix<Scalar>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("spmm: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + ")");
  }
  std::vector<std::vector<ColIndex>> out_cols(a.rows());
  std::vector<std::vector<Scalar>> out_vals(a.rows());
  std::vector<detail::ScatterBuffer<Scalar>> buffers(static_cast<std::size_t>(max_threads()));
  parallel_for(a.rows(), [&](Index r, int t) {
    auto& buf = buffers[static_cast<std::size_t>(t)];
    if (buf.acc.size() != b.cols()) buf = detail::ScatterBuffer<Scalar>(b.cols());
    const auto ac = a.row_cols(r);
    const auto av = a.row_values(r);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      const auto bc = b.row_cols(ac[p]);
      const auto bv = b.row_values(ac[p]);
      for (std::size_t q = 0; q < bc.size(); ++q) buf.add(bc[q], av[p] * bv[q]);
    }
    auto& oc = out_cols[r];
    auto& ov = out_vals[r];
    oc.reserve(buf.touched.size());
    ov.reserve(buf.touched.size());
    buf.gather([&](ColIndex c, Scalar v) {
      oc.push_back(c);
      ov.push_back(v);
    });
  });
  return detail::assemble_rows(a.rows(), b.cols(), out_cols, out_vals);
}

// mᵀ·m. Entry (i, j) sums m[r,i]·m[r,j] over ascending r; (i, j) and (j, i)
// are formed from the same products in the same order, so the result is
// exactly symmetric.
template <typename Scalar>
SparseMatrix<Scalar> gram(const SparseMatrix<Scalar>& m) {
  return spmm(transpose(m), m);
}

// Entrywise v^s. The sparsity pattern is kept except where v^s underflows.
template <typename Scalar>
SparseMatrix<Scalar> hadamard_pow(const SparseMatrix<Scalar>& m, Scalar s) {
  if (!(s > Scalar(0)) || !std::isfinite(s)) throw ParameterError("hadamard_pow: exponent must be > 0");
  for (const Scalar v : m.values()) {
    if (v < Scalar(0)) throw DomainError("hadamard_pow: negative entry");
  }
  if (s == Scalar(1)) return m;
  std::vector<Scalar> values(m.values());
  for (Scalar& v : values) v = std::pow(v, s);
  return SparseMatrix<Scalar>::from_csr(m.rows(), m.cols(), m.row_ptr(), m.col_idx(),
                                        std::move(values));
}

template <typename Scalar>
SparseMatrix<Scalar> submatrix(const SparseMatrix<Scalar>& m, Range rows, Range cols) {
  if (rows.begin > rows.end || cols.begin > cols.end || rows.end > m.rows() || cols.end > m.cols()) {
    throw DimensionError("submatrix: range out of bounds");
  }
  std::vector<Index> row_ptr(rows.size() + 1, 0);
  std::vector<ColIndex> col_idx;
  std::vector<Scalar> values;
  for (Index r = rows.begin; r < rows.end; ++r) {
    const auto rc = m.row_cols(r);
    const auto rv = m.row_values(r);
    const auto lo = std::lower_bound(rc.begin(), rc.end(), static_cast<ColIndex>(cols.begin));
    const auto hi = std::lower_bound(lo, rc.end(), static_cast<ColIndex>(cols.end));
    for (auto it = lo; it != hi; ++it) {
      col_idx.push_back(static_cast<ColIndex>(*it - cols.begin));
      values.push_back(rv[static_cast<std::size_t>(it - rc.begin())]);
    }
    row_ptr[r - rows.begin + 1] = col_idx.size();
  }
  return SparseMatrix<Scalar>::from_csr(rows.size(), cols.size(), std::move(row_ptr),
                                        std::move(col_idx), std::move(values));
}

// signal · m for a dense row signal. Rows of m are visited in ascending order.
template <typename Scalar, typename Derived>
DenseRow<Scalar> spmv_row(const Eigen::MatrixBase<Derived>& signal, const SparseMatrix<Scalar>& m) {
  if (static_cast<Index>(signal.size()) != m.rows()) {
    throw DimensionError("spmv_row: signal length " + std::to_string(signal.size()) +
                         " does not match " + std::to_string(m.rows()) + " rows");
  }
  DenseRow<Scalar> out = DenseRow<Scalar>::Zero(static_cast<Eigen::Index>(m.cols()));
  for (Index r = 0; r < m.rows(); ++r) {
    const Scalar x = signal(static_cast<Eigen::Index>(r));
    if (x == Scalar(0)) continue;
    const auto rc = m.row_cols(r);
    const auto rv = m.row_values(r);
    for (std::size_t p = 0; p < rc.size(); ++p) out[rc[p]] += x * rv[p];
  }
  return out;
}

// a·x + b·y over the union pattern.
template <typename Scalar>
SparseMatrix<Scalar> add_scaled(Scalar a, const SparseMatrix<Scalar>& x, Scalar b,
                                const SparseMatrix<Scalar>& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("add_scaled: shapes differ");
  std::vector<Index> row_ptr(x.rows() + 1, 0);
  std::vector<ColIndex> col_idx;
  std::vector<Scalar> values;
  col_idx.reserve(std::max(x.nnz(), y.nnz()));
  values.reserve(std::max(x.nnz(), y.nnz()));
  for (Index r = 0; r < x.rows(); ++r) {
    const auto xc = x.row_cols(r);
    const auto xv = x.row_values(r);
    const auto yc = y.row_cols(r);
    const auto yv = y.row_values(r);
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < xc.size() || q < yc.size()) {
      if (q == yc.size() || (p < xc.size() && xc[p] < yc[q])) {
        col_idx.push_back(xc[p]);
        values.push_back(a * xv[p++]);
      } else if (p == xc.size() || yc[q] < xc[p]) {
        col_idx.push_back(yc[q]);
        values.push_back(b * yv[q++]);
      } else {
        col_idx.push_back(xc[p]);
        values.push_back(a * xv[p++] + b * yv[q++]);
      }
    }
    row_ptr[r + 1] = col_idx.size();
  }
  return SparseMatrix<Scalar>::from_csr(x.rows(), x.cols(), std::move(row_ptr), std::move(col_idx),
                                        std::move(values));
}

// max |m[i,j] − m[j,i]|; +inf for non-square input.
template <typename Scalar>
Scalar asymmetry(const SparseMatrix<Scalar>& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<Scalar>::infinity();
  Scalar worst(0);
  for (Index r = 0; r < m.rows(); ++r) {
    const auto rc = m.row_cols(r);
    const auto rv = m.row_values(r);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      worst = std::max(worst, std::abs(rv[p] - m.coeff(rc[p], r)));
    }
  }
  return worst;
}

}  // namespace ggf
