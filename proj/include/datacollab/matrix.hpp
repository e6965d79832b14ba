#pragma once

#include <cstdint>
#include <vector>

#include "datacollab/errors.hpp"
#include "datacollab/rng.hpp"

namespace dc {

using index_t = std::int64_t;

/// Dense real matrix, 64-bit scalars, row-major storage.
///
/// Invariants: data().size() == rows()*cols(); entries are finite whenever
/// the matrix was built from external data (checked constructor, file
/// readers). Internally produced matrices keep finiteness by construction.
class Matrix {
 public:
  Matrix() = default;

  /// Zero matrix of the given shape.
  Matrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw DimensionError("matrix shape must be non-negative");
    data_.assign(static_cast<std::size_t>(rows * cols), 0.0);
  }

  /// Checked construction from row-major data.
  Matrix(index_t rows, index_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows < 0 || cols < 0) throw DimensionError("matrix shape must be non-negative");
    if (data_.size() != static_cast<std::size_t>(rows * cols))
      throw DimensionError("data length does not match rows*cols");
    validate_finite();
  }

  static Matrix identity(index_t n) {
    Matrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const std::vector<double>& d) {
    Matrix m(static_cast<index_t>(d.size()), static_cast<index_t>(d.size()));
    for (index_t i = 0; i < m.rows(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  static Matrix random_uniform(index_t rows, index_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    Rng rng(seed);
    for (double& v : m.data_) v = rng.uniform();
    return m;
  }

  static Matrix random_gaussian(index_t rows, index_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    Rng rng(seed);
    for (double& v : m.data_) v = rng.gaussian();
    return m;
  }

  index_t rows() const noexcept { return rows_; }
  index_t cols() const noexcept { return cols_; }
  index_t size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(index_t i, index_t j) {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }
  double operator()(index_t i, index_t j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  /// Throws ValidationError if any entry is NaN or infinite.
  void validate_finite() const;

  Matrix transposed() const;
  double frobenius_norm() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> data_;
};

/// C = A * B (checked shapes).
Matrix matmul(const Matrix& a, const Matrix& b);
/// C = A^T * B without forming A^T.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// C = A * B^T without forming B^T.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// Horizontal concatenation [A_1 ... A_k]; all blocks share row count.
Matrix hcat(const std::vector<Matrix>& blocks);
/// Vertical concatenation; all blocks share column count.
Matrix vcat(const std::vector<Matrix>& blocks);

double frobenius_distance(const Matrix& a, const Matrix& b);

}  // namespace dc
