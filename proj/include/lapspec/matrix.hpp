#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lapspec/error.hpp"

namespace lapspec {

/// Dense row-major matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    DenseMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i)
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i].at(j);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* r = data_.data() + i * cols_;
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Maximum absolute column sum.
  double norm1() const {
    std::vector<double> col(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) col[j] += std::abs((*this)(i, j));
    return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  DenseMatrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric sparse matrix in compressed-row form. The full pattern (both
/// triangles) is stored, with column indices sorted within each row.
class SymSparseMatrix {
public:
  SymSparseMatrix() = default;

  /// Builds an all-zero matrix from per-row sorted column lists.
  explicit SymSparseMatrix(const std::vector<std::vector<std::size_t>>& pattern) {
    row_ptr_.reserve(pattern.size() + 1);
    row_ptr_.push_back(0);
    for (const auto& cols : pattern) {
      col_idx_.insert(col_idx_.end(), cols.begin(), cols.end());
      row_ptr_.push_back(col_idx_.size());
    }
    values_.assign(col_idx_.size(), 0.0);
  }

  std::size_t order() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_columns(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// Entry (i, j); zero outside the pattern.
  double operator()(std::size_t i, std::size_t j) const {
    auto cols = row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
  }

  /// Adds v to entry (i, j), which must be in the pattern.
  void add(std::size_t i, std::size_t j, double v) {
    auto cols = row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) throw InvalidArgument("fem", "entry outside sparsity pattern");
    values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())] += v;
  }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(order(), 0.0);
    for (std::size_t i = 0; i < order(); ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
      y[i] = s;
    }
    return y;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Largest |M(i,j) - M(j,i)|.
  double asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i < order(); ++i) {
      auto cols = row_columns(i);
      auto vals = row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) m = std::max(m, std::abs(vals[k] - (*this)(cols[k], i)));
    }
    return m;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(order(), order());
    for (std::size_t i = 0; i < order(); ++i) {
      auto cols = row_columns(i);
      auto vals = row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
    }
    return d;
  }

  /// Dense principal submatrix on the given (sorted) index set.
  DenseMatrix principal_submatrix(std::span<const std::size_t> keep) const {
    std::vector<std::size_t> pos(order(), static_cast<std::size_t>(-1));
    for (std::size_t r = 0; r < keep.size(); ++r) pos[keep[r]] = r;
    DenseMatrix d(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
      auto cols = row_columns(keep[r]);
      auto vals = row_values(keep[r]);
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (pos[cols[k]] != static_cast<std::size_t>(-1)) d(r, pos[cols[k]]) = vals[k];
    }
    return d;
  }

  SymSparseMatrix& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }

  const std::vector<double>& values() const noexcept { return values_; }
  bool same_pattern(const SymSparseMatrix& o) const { return row_ptr_ == o.row_ptr_ && col_idx_ == o.col_idx_; }

  /// Coordinate-format dump: one "i j value" line per stored entry, 17 significant digits.
  void write_coordinate(std::ostream& os) const {
    char buf[64];
    for (std::size_t i = 0; i < order(); ++i) {
      auto cols = row_columns(i);
      auto vals = row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i, cols[k], vals[k]);
        os << buf;
      }
    }
  }

private:
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace lapspec
