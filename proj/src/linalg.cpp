#include "datacollab/linalg.hpp"

#include <lapacke.h>
#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dc {

namespace {

int checked_int(index_t v, const char* what) {
  if (v > 0x7fffffff) throw DimensionError(std::string(what) + " exceeds 32-bit LAPACK index");
  return static_cast<int>(v);
}

}  // namespace

SvdFactors thin_svd(const Matrix& m) {
  if (m.empty()) throw DimensionError("thin_svd: empty matrix");
  const int rows = checked_int(m.rows(), "rows");
  const int cols = checked_int(m.cols(), "cols");
  const int k = std::min(rows, cols);

  Matrix a = m;  // dgesdd destroys its input
  Matrix u(rows, k);
  std::vector<double> sigma(static_cast<std::size_t>(k));
  Matrix vt(k, cols);
  const int info =
      LAPACKE_dgesdd(LAPACK_ROW_MAJOR, 'S', rows, cols, a.data().data(), cols, sigma.data(),
                     u.data().data(), k, vt.data().data(), cols);
  if (info < 0) throw DimensionError("thin_svd: invalid argument " + std::to_string(-info));
  if (info > 0) throw NumericalError("thin_svd: SVD iteration failed to converge");
  return SvdFactors{std::move(u), std::move(sigma), std::move(vt)};
}

QrFactors thin_qr(const Matrix& m) {
  if (m.empty()) throw DimensionError("thin_qr: empty matrix");
  if (m.rows() < m.cols()) throw DimensionError("thin_qr: requires rows >= cols");
  const int rows = checked_int(m.rows(), "rows");
  const int cols = checked_int(m.cols(), "cols");

  Matrix a = m;
  std::vector<double> tau(static_cast<std::size_t>(cols));
  int info = LAPACKE_dgeqrf(LAPACK_ROW_MAJOR, rows, cols, a.data().data(), cols, tau.data());
  if (info != 0) throw NumericalError("thin_qr: dgeqrf failed");

  Matrix r(cols, cols);
  for (index_t i = 0; i < cols; ++i)
    for (index_t j = i; j < cols; ++j) r(i, j) = a(i, j);

  info = LAPACKE_dorgqr(LAPACK_ROW_MAJOR, rows, cols, cols, a.data().data(), cols, tau.data());
  if (info != 0) throw NumericalError("thin_qr: dorgqr failed");

  // Sign convention: non-negative R diagonal, flipping Q columns to match.
  for (index_t j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) {
      for (index_t t = j; t < cols; ++t) r(j, t) = -r(j, t);
      for (index_t i = 0; i < rows; ++i) a(i, j) = -a(i, j);
    }
  }

  const double threshold = kRankCutoff * m.frobenius_norm();
  for (index_t j = 0; j < cols; ++j) {
    if (std::fabs(r(j, j)) < threshold)
      throw RankError("thin_qr: rank-deficient input (|r_" + std::to_string(j) + std::to_string(j) +
                      "| below cutoff)");
  }
  return QrFactors{std::move(a), std::move(r)};
}

Matrix pinv(const Matrix& m) {
  if (m.empty()) throw DimensionError("pinv: empty matrix");
  SvdFactors svd = thin_svd(m);
  const index_t k = static_cast<index_t>(svd.sigma.size());
  const double cutoff = kRankCutoff * (k > 0 ? svd.sigma[0] : 0.0);
  // pinv = V * diag(1/sigma) * U^T, dropping directions below the cutoff.
  Matrix vs(m.cols(), k);  // V with inverted singular values folded in
  for (index_t i = 0; i < m.cols(); ++i)
    for (index_t j = 0; j < k; ++j) {
      const double s = svd.sigma[static_cast<std::size_t>(j)];
      vs(i, j) = (s > cutoff) ? svd.vt(j, i) / s : 0.0;
    }
  return matmul_nt(vs, svd.u);
}

Matrix haar_orthogonal(index_t dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("haar_orthogonal: dim must be >= 1");
  // QR of a Gaussian matrix; thin_qr already applies the sign correction
  // O = Q diag(sign(diag(R))), which is what makes the law exactly Haar.
  std::uint64_t draw_seed = seed;
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      return thin_qr(Matrix::random_gaussian(dim, dim, draw_seed)).q_factor;
    } catch (const RankError&) {
      draw_seed = splitmix64(draw_seed);  // measure-zero event; redraw
    }
  }
  throw NumericalError("haar_orthogonal: repeated rank-deficient Gaussian draws");
}

std::vector<double> solve_upper_triangular(const Matrix& r, const std::vector<double>& b) {
  if (r.rows() != r.cols()) throw DimensionError("solve_upper_triangular: matrix not square");
  const index_t n = r.rows();
  if (static_cast<index_t>(b.size()) != n)
    throw DimensionError("solve_upper_triangular: rhs length mismatch");
  for (index_t i = 0; i < n; ++i)
    if (r(i, i) == 0.0) throw SingularError("solve_upper_triangular: zero diagonal entry");

  std::vector<double> x(b);
  for (index_t i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (index_t j = i + 1; j < n; ++j) s -= r(i, j) * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s / r(i, i);
  }
  return x;
}

LeadingSvd leading_singular_triplets(const Matrix& m, index_t k, bool want_u, bool want_v) {
  if (m.empty()) throw DimensionError("leading_singular_triplets: empty matrix");
  if (k < 1 || k > std::min(m.rows(), m.cols()))
    throw DimensionError("leading_singular_triplets: k out of range");

  // Eigendecompose the smaller Gram matrix, then map across with
  // W v = sigma u (right side) or W^T u = sigma v (left side).
  const bool gram_on_cols = m.cols() <= m.rows();
  const index_t n = gram_on_cols ? m.cols() : m.rows();
  const int ni = checked_int(n, "gram side");

  Matrix gram(n, n);
  cblas_dsyrk(CblasRowMajor, CblasUpper, gram_on_cols ? CblasTrans : CblasNoTrans, ni,
              checked_int(gram_on_cols ? m.rows() : m.cols(), "other side"), 1.0, m.data().data(),
              static_cast<int>(m.cols()), 0.0, gram.data().data(), ni);

  const int ki = checked_int(k, "k");
  std::vector<double> evals(static_cast<std::size_t>(n));
  Matrix evecs(n, k);
  std::vector<int> isuppz(static_cast<std::size_t>(2 * k));
  int found = 0;
  const int info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'V', 'I', 'U', ni, gram.data().data(), ni, 0.0,
                                  0.0, ni - ki + 1, ni, 0.0, &found, evals.data(),
                                  evecs.data().data(), ki, isuppz.data());
  if (info != 0 || found != ki)
    throw NumericalError("leading_singular_triplets: symmetric eigensolver failed");

  // dsyevr returns ascending eigenvalues; flip to descending.
  LeadingSvd out;
  out.sigma.resize(static_cast<std::size_t>(k));
  Matrix small_vectors(n, k);
  for (index_t j = 0; j < k; ++j) {
    const index_t src = k - 1 - j;
    out.sigma[static_cast<std::size_t>(j)] =
        std::sqrt(std::max(0.0, evals[static_cast<std::size_t>(src)]));
    for (index_t i = 0; i < n; ++i) small_vectors(i, j) = evecs(i, src);
  }

  const double sigma_floor = kRankCutoff * std::max(out.sigma[0], 1e-300);
  if (gram_on_cols) {
    out.v = std::move(small_vectors);
    if (want_u) {
      out.u = matmul(m, out.v);
      for (index_t j = 0; j < k; ++j) {
        const double s = std::max(out.sigma[static_cast<std::size_t>(j)], sigma_floor);
        for (index_t i = 0; i < out.u.rows(); ++i) out.u(i, j) /= s;
      }
    }
  } else {
    out.u = std::move(small_vectors);
    if (want_v) {
      out.v = matmul_tn(m, out.u);
      for (index_t j = 0; j < k; ++j) {
        const double s = std::max(out.sigma[static_cast<std::size_t>(j)], sigma_floor);
        for (index_t i = 0; i < out.v.rows(); ++i) out.v(i, j) /= s;
      }
    }
  }
  return out;
}

Matrix polar_factor(const Matrix& m) {
  SvdFactors svd = thin_svd(m);
  return matmul(svd.u, svd.vt);
}

double condition_number(const Matrix& m) {
  SvdFactors svd = thin_svd(m);
  const double smax = svd.sigma.front();
  const double smin = svd.sigma.back();
  if (smin <= kRankCutoff * smax) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

bool is_orthogonal(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Matrix gram = matmul_tn(m, m);
  for (index_t i = 0; i < gram.rows(); ++i) gram(i, i) -= 1.0;
  return gram.frobenius_norm() <= tol;
}

}  // namespace dc
