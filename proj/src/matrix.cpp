#include "datacollab/matrix.hpp"

#include <cblas.h>

#include <cmath>
#include <string>

namespace dc {

void Matrix::validate_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw ValidationError("matrix contains a non-finite entry");
  }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (index_t i = 0; i < rows_; ++i)
    for (index_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::fabs(v));
  return s;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (!same_shape(other)) throw DimensionError("shape mismatch in matrix addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (!same_shape(other)) throw DimensionError("shape mismatch in matrix subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  Matrix c(a.rows(), b.cols());
  if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0) return c;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(a.rows()),
              static_cast<int>(b.cols()), static_cast<int>(a.cols()), 1.0, a.data().data(),
              static_cast<int>(a.cols()), b.data().data(), static_cast<int>(b.cols()), 0.0,
              c.data().data(), static_cast<int>(c.cols()));
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row counts differ");
  Matrix c(a.cols(), b.cols());
  if (c.rows() == 0 || c.cols() == 0 || a.rows() == 0) return c;
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(a.cols()),
              static_cast<int>(b.cols()), static_cast<int>(a.rows()), 1.0, a.data().data(),
              static_cast<int>(a.cols()), b.data().data(), static_cast<int>(b.cols()), 0.0,
              c.data().data(), static_cast<int>(c.cols()));
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("matmul_nt: column counts differ");
  Matrix c(a.rows(), b.rows());
  if (c.rows() == 0 || c.cols() == 0 || a.cols() == 0) return c;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(a.rows()),
              static_cast<int>(b.rows()), static_cast<int>(a.cols()), 1.0, a.data().data(),
              static_cast<int>(a.cols()), b.data().data(), static_cast<int>(b.cols()), 0.0,
              c.data().data(), static_cast<int>(c.cols()));
  return c;
}

Matrix hcat(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) throw DimensionError("hcat: empty block list");
  const index_t rows = blocks.front().rows();
  index_t cols = 0;
  for (const Matrix& b : blocks) {
    if (b.rows() != rows) throw DimensionError("hcat: row counts differ");
    cols += b.cols();
  }
  Matrix out(rows, cols);
  index_t offset = 0;
  for (const Matrix& b : blocks) {
    for (index_t i = 0; i < rows; ++i)
      for (index_t j = 0; j < b.cols(); ++j) out(i, offset + j) = b(i, j);
    offset += b.cols();
  }
  return out;
}

Matrix vcat(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) throw DimensionError("vcat: empty block list");
  const index_t cols = blocks.front().cols();
  index_t rows = 0;
  for (const Matrix& b : blocks) {
    if (b.cols() != cols) throw DimensionError("vcat: column counts differ");
    rows += b.rows();
  }
  Matrix out(rows, cols);
  index_t offset = 0;
  for (const Matrix& b : blocks) {
    for (index_t i = 0; i < b.rows(); ++i)
      for (index_t j = 0; j < cols; ++j) out(offset + i, j) = b(i, j);
    offset += b.rows();
  }
  return out;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw DimensionError("frobenius_distance: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace dc
