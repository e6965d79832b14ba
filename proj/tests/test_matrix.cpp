#include <cmath>
#include <limits>

#include "datacollab/matrix.hpp"
#include "doctest.h"

using dc::Matrix;

TEST_CASE("construction checks shape and finiteness") {
  CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), dc::DimensionError);
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                  dc::ValidationError);
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::infinity()}),
                  dc::ValidationError);
  const Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6.0);
}

TEST_CASE("matmul agrees with a hand-computed product") {
  const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
  const Matrix b(3, 2, {7, 8, 9, 10, 11, 12});
  const Matrix c = matmul(a, b);
  CHECK(c(0, 0) == doctest::Approx(58));
  CHECK(c(0, 1) == doctest::Approx(64));
  CHECK(c(1, 0) == doctest::Approx(139));
  CHECK(c(1, 1) == doctest::Approx(154));
  CHECK_THROWS_AS(matmul(a, a), dc::DimensionError);
}

TEST_CASE("transposed products avoid forming the transpose") {
  const Matrix a = Matrix::random_gaussian(5, 3, 11);
  const Matrix b = Matrix::random_gaussian(5, 4, 12);
  CHECK(dc::frobenius_distance(matmul_tn(a, b), matmul(a.transposed(), b)) < 1e-12);
  const Matrix c = Matrix::random_gaussian(4, 3, 13);
  CHECK(dc::frobenius_distance(matmul_nt(a, c), matmul(a, c.transposed())) < 1e-12);
}

TEST_CASE("hcat and vcat block layout") {
  const Matrix a(2, 1, {1, 2});
  const Matrix b(2, 2, {3, 4, 5, 6});
  const Matrix h = dc::hcat({a, b});
  CHECK(h.rows() == 2);
  CHECK(h.cols() == 3);
  CHECK(h(0, 0) == 1);
  CHECK(h(0, 1) == 3);
  CHECK(h(1, 2) == 6);

  const Matrix v = dc::vcat({a.transposed(), b});
  CHECK(v.rows() == 3);
  CHECK(v.cols() == 2);
  CHECK(v(0, 1) == 2);
  CHECK(v(2, 0) == 5);

  CHECK_THROWS_AS(dc::hcat({a, Matrix(3, 1)}), dc::DimensionError);
  CHECK_THROWS_AS(dc::vcat({a, Matrix(2, 2)}), dc::DimensionError);
}

TEST_CASE("random fills are deterministic in the seed") {
  const Matrix a = Matrix::random_uniform(4, 4, 99);
  const Matrix b = Matrix::random_uniform(4, 4, 99);
  CHECK(a == b);
  CHECK_FALSE(a == Matrix::random_uniform(4, 4, 100));
  for (double v : a.data()) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("frobenius helpers") {
  const Matrix m(2, 2, {3, 0, 0, 4});
  CHECK(m.frobenius_norm() == doctest::Approx(5.0));
  CHECK(dc::frobenius_distance(m, Matrix(2, 2)) == doctest::Approx(5.0));
  CHECK(m.max_abs() == 4.0);
}
