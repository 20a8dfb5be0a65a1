#include "pmsfem/linalg/sparse.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/simd/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pmsfem::linalg {
namespace {

// Bucket by row, sort columns inside each row, sum duplicates.
void compress(int rows, std::vector<Triplet>& t, std::vector<int>& row_ptr, std::vector<int>& col_idx,
              std::vector<double>& values) {
  std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& e : t) ++count[static_cast<std::size_t>(e.row) + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::pair<int, double>> bucket(t.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const auto& e : t) bucket[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.row)]++)] = {e.col, e.value};

  row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  col_idx.clear();
  values.clear();
  col_idx.reserve(t.size());
  values.reserve(t.size());
  for (int r = 0; r < rows; ++r) {
    auto first = bucket.begin() + count[static_cast<std::size_t>(r)];
    auto last = bucket.begin() + count[static_cast<std::size_t>(r) + 1];
    std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (!col_idx.empty() && static_cast<int>(col_idx.size()) > row_ptr[static_cast<std::size_t>(r)] &&
          col_idx.back() == it->first) {
        values.back() += it->second;
      } else {
        col_idx.push_back(it->first);
        values.push_back(it->second);
      }
    }
    row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(col_idx.size());
  }
}

void check_index(int i, int bound, const char* what) {
  if (i < 0 || i >= bound)
    throw Error(ErrorCode::IndexOutOfRange,
                std::string(what) + " index " + std::to_string(i) + " outside [0, " + std::to_string(bound) + ")");
}

} // namespace

SparseSym SparseSym::from_triplets(int n, std::span<const Triplet> triplets) {
  std::vector<Triplet> t;
  t.reserve(triplets.size());
  for (const auto& e : triplets) {
    check_index(e.row, n, "row");
    check_index(e.col, n, "column");
    t.push_back(e.row <= e.col ? e : Triplet{e.col, e.row, e.value});
  }
  SparseSym s;
  s.n_ = n;
  compress(n, t, s.row_ptr_, s.col_idx_, s.values_);
  return s;
}

double SparseSym::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  check_index(i, n_, "row");
  check_index(j, n_, "column");
  const auto first = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  const auto last = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - col_idx_.begin())] : 0.0;
}

void SparseSym::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(n_) || y.size() != x.size())
    throw Error(ErrorCode::DimensionMismatch, "SparseSym::multiply: vector length");
  const auto& k = simd::kernels();
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < n_; ++i) {
    const int b = row_ptr_[static_cast<std::size_t>(i)];
    const int e = row_ptr_[static_cast<std::size_t>(i) + 1];
    // Upper part as a gather-dot, mirrored part as a scatter.
    y[static_cast<std::size_t>(i)] += k.gather_dot(col_idx_.data() + b, values_.data() + b, x.data(),
                                                   static_cast<std::size_t>(e - b));
    const double xi = x[static_cast<std::size_t>(i)];
    for (int p = b; p < e; ++p) {
      const int j = col_idx_[static_cast<std::size_t>(p)];
      if (j != i) y[static_cast<std::size_t>(j)] += values_[static_cast<std::size_t>(p)] * xi;
    }
  }
}

Vector SparseSym::operator*(std::span<const double> x) const {
  Vector y(x.size());
  multiply(x, y);
  return y;
}

double SparseSym::bilinear(std::span<const double> x, std::span<const double> y) const {
  const Vector ay = (*this) * y;
  return simd::dot(x, ay);
}

SparseSym SparseSym::submatrix(std::span<const int> keep) const {
  std::vector<int> map(static_cast<std::size_t>(n_), -1);
  for (std::size_t a = 0; a < keep.size(); ++a) {
    check_index(keep[a], n_, "submatrix");
    map[static_cast<std::size_t>(keep[a])] = static_cast<int>(a);
  }
  std::vector<Triplet> t;
  for (int i = 0; i < n_; ++i) {
    const int li = map[static_cast<std::size_t>(i)];
    if (li < 0) continue;
    for (int p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
      const int lj = map[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(p)])];
      if (lj >= 0) t.push_back({li, lj, values_[static_cast<std::size_t>(p)]});
    }
  }
  return from_triplets(static_cast<int>(keep.size()), t);
}

CsrMatrix SparseSym::block(std::span<const int> rows, std::span<const int> cols) const {
  std::vector<int> rmap(static_cast<std::size_t>(n_), -1), cmap(static_cast<std::size_t>(n_), -1);
  for (std::size_t a = 0; a < rows.size(); ++a) rmap[static_cast<std::size_t>(rows[a])] = static_cast<int>(a);
  for (std::size_t a = 0; a < cols.size(); ++a) cmap[static_cast<std::size_t>(cols[a])] = static_cast<int>(a);
  std::vector<Triplet> t;
  for (int i = 0; i < n_; ++i) {
    for (int p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
      const int j = col_idx_[static_cast<std::size_t>(p)];
      const double v = values_[static_cast<std::size_t>(p)];
      const int ri = rmap[static_cast<std::size_t>(i)], cj = cmap[static_cast<std::size_t>(j)];
      if (ri >= 0 && cj >= 0) t.push_back({ri, cj, v});
      if (i != j) {
        const int rj = rmap[static_cast<std::size_t>(j)], ci = cmap[static_cast<std::size_t>(i)];
        if (rj >= 0 && ci >= 0) t.push_back({rj, ci, v});
      }
    }
  }
  return CsrMatrix::from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()), t);
}

CsrMatrix SparseSym::to_full() const {
  std::vector<Triplet> t;
  t.reserve(2 * values_.size());
  for (int i = 0; i < n_; ++i)
    for (int p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
      const int j = col_idx_[static_cast<std::size_t>(p)];
      t.push_back({i, j, values_[static_cast<std::size_t>(p)]});
      if (j != i) t.push_back({j, i, values_[static_cast<std::size_t>(p)]});
    }
  return CsrMatrix::from_triplets(n_, n_, t);
}

DenseMatrix SparseSym::to_dense() const {
  DenseMatrix d(static_cast<std::size_t>(n_), static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i)
    for (int p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
      const auto j = static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(p)]);
      d(static_cast<std::size_t>(i), j) = values_[static_cast<std::size_t>(p)];
      d(j, static_cast<std::size_t>(i)) = values_[static_cast<std::size_t>(p)];
    }
  return d;
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  std::vector<Triplet> t(triplets.begin(), triplets.end());
  for (const auto& e : t) {
    check_index(e.row, rows, "row");
    check_index(e.col, cols, "column");
  }
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  compress(rows, t, m.row_ptr_, m.col_idx_, m.values_);
  return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols_) || y.size() != static_cast<std::size_t>(rows_))
    throw Error(ErrorCode::DimensionMismatch, "CsrMatrix::multiply: vector length");
  const auto& k = simd::kernels();
  for (int i = 0; i < rows_; ++i) {
    const int b = row_ptr_[static_cast<std::size_t>(i)];
    const int e = row_ptr_[static_cast<std::size_t>(i) + 1];
    y[static_cast<std::size_t>(i)] =
        k.gather_dot(col_idx_.data() + b, values_.data() + b, x.data(), static_cast<std::size_t>(e - b));
  }
}

Vector CsrMatrix::operator*(std::span<const double> x) const {
  Vector y(static_cast<std::size_t>(rows_));
  multiply(x, y);
  return y;
}

Vector CsrMatrix::multiply_transposed(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(rows_))
    throw Error(ErrorCode::DimensionMismatch, "CsrMatrix::multiply_transposed: vector length");
  Vector y(static_cast<std::size_t>(cols_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    if (xi == 0.0) continue;
    for (int p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p)
      y[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(p)])] += values_[static_cast<std::size_t>(p)] * xi;
  }
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int i = 0; i < rows_; ++i)
    for (int p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p)
      t.push_back({col_idx_[static_cast<std::size_t>(p)], i, values_[static_cast<std::size_t>(p)]});
  return from_triplets(cols_, rows_, t);
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d(static_cast<std::size_t>(rows_), static_cast<std::size_t>(cols_));
  for (int i = 0; i < rows_; ++i)
    for (int p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p)
      d(static_cast<std::size_t>(i), static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(p)])) +=
          values_[static_cast<std::size_t>(p)];
  return d;
}

CsrMatrix CsrMatrix::select_rows(std::span<const std::size_t> rows) const {
  CsrMatrix m;
  m.rows_ = static_cast<int>(rows.size());
  m.cols_ = cols_;
  m.row_ptr_.assign(rows.size() + 1, 0);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto r = rows[a];
    if (r >= static_cast<std::size_t>(rows_)) throw Error(ErrorCode::IndexOutOfRange, "select_rows");
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      m.col_idx_.push_back(col_idx_[static_cast<std::size_t>(p)]);
      m.values_.push_back(values_[static_cast<std::size_t>(p)]);
    }
    m.row_ptr_[a + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::DimensionMismatch, "sparse multiply: inner dimensions differ");
  // Gustavson row-by-row product with a dense accumulator.
  CsrMatrix c;
  c.rows_ = a.rows_;
  c.cols_ = b.cols_;
  c.row_ptr_.assign(static_cast<std::size_t>(a.rows_) + 1, 0);
  std::vector<double> acc(static_cast<std::size_t>(b.cols_), 0.0);
  std::vector<int> marker(static_cast<std::size_t>(b.cols_), -1);
  std::vector<int> touched;
  for (int i = 0; i < a.rows_; ++i) {
    touched.clear();
    for (int p = a.row_ptr_[static_cast<std::size_t>(i)]; p < a.row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
      const int l = a.col_idx_[static_cast<std::size_t>(p)];
      const double av = a.values_[static_cast<std::size_t>(p)];
      for (int q = b.row_ptr_[static_cast<std::size_t>(l)]; q < b.row_ptr_[static_cast<std::size_t>(l) + 1]; ++q) {
        const int j = b.col_idx_[static_cast<std::size_t>(q)];
        if (marker[static_cast<std::size_t>(j)] != i) {
          marker[static_cast<std::size_t>(j)] = i;
          acc[static_cast<std::size_t>(j)] = 0.0;
          touched.push_back(j);
        }
        acc[static_cast<std::size_t>(j)] += av * b.values_[static_cast<std::size_t>(q)];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int j : touched) {
      c.col_idx_.push_back(j);
      c.values_.push_back(acc[static_cast<std::size_t>(j)]);
    }
    c.row_ptr_[static_cast<std::size_t>(i) + 1] = static_cast<int>(c.col_idx_.size());
  }
  return c;
}

SparseSym congruence(const CsrMatrix& r, const SparseSym& a) {
  if (r.cols() != a.size()) throw Error(ErrorCode::DimensionMismatch, "congruence: R columns != A size");
  const CsrMatrix ra = multiply(r, a.to_full());
  const CsrMatrix rart = multiply(ra, r.transpose());
  std::vector<Triplet> t;
  t.reserve(rart.nonzeros() / 2 + static_cast<std::size_t>(rart.rows()));
  for (int i = 0; i < rart.rows(); ++i)
    for (int p = rart.row_ptr()[static_cast<std::size_t>(i)]; p < rart.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p) {
      const int j = rart.col_idx()[static_cast<std::size_t>(p)];
      if (j >= i) t.push_back({i, j, rart.values()[static_cast<std::size_t>(p)]});
    }
  return SparseSym::from_triplets(r.rows(), t);
}

DenseMatrix congruence(const DenseMatrix& psi, const SparseSym& a) {
  if (psi.rows() != static_cast<std::size_t>(a.size()))
    throw Error(ErrorCode::DimensionMismatch, "congruence: snapshot rows != matrix size");
  DenseMatrix apsi(psi.rows(), psi.cols());
  for (std::size_t j = 0; j < psi.cols(); ++j) a.multiply(psi.col(j), apsi.col(j));
  const auto& k = simd::kernels();
  DenseMatrix out(psi.cols(), psi.cols());
  for (std::size_t j = 0; j < psi.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const double v = k.dot(psi.col(i).data(), apsi.col(j).data(), psi.rows());
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

} // namespace pmsfem::linalg
