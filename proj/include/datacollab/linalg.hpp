#pragma once

#include <cstdint>
#include <vector>

#include "datacollab/matrix.hpp"

namespace dc {

/// Relative cutoff used everywhere a numerical rank decision is made:
/// singular values below kRankCutoff * sigma_max count as zero.
inline constexpr double kRankCutoff = 1e-12;

/// Thin SVD of a p x q matrix: u is p x k with orthonormal columns, sigma
/// holds the k singular values in descending order, vt is k x q with
/// orthonormal rows, k = min(p, q).
struct SvdFactors {
  Matrix u;
  std::vector<double> sigma;
  Matrix vt;
};

/// Thin QR of a p x q matrix with p >= q: q_factor is p x q with
/// orthonormal columns, r_factor is q x q upper triangular with
/// non-negative diagonal (column signs of Q flipped to enforce it, which
/// makes the factorization unique for full-column-rank input).
struct QrFactors {
  Matrix q_factor;
  Matrix r_factor;
};

SvdFactors thin_svd(const Matrix& m);

QrFactors thin_qr(const Matrix& m);

/// Moore-Penrose pseudoinverse via SVD; singular values below
/// kRankCutoff * sigma_max are treated as zero.
Matrix pinv(const Matrix& m);

/// Haar-distributed random orthogonal matrix: QR of a seeded Gaussian
/// matrix with the R-diagonal sign correction folded into Q.
Matrix haar_orthogonal(index_t dim, std::uint64_t seed);

/// Back substitution for upper-triangular r; reads only the upper part.
std::vector<double> solve_upper_triangular(const Matrix& r, const std::vector<double>& b);

/// Leading k singular triplets of a (possibly very rectangular) matrix,
/// computed from the symmetric eigendecomposition of the smaller Gram
/// matrix. Exact (non-randomized) and much cheaper than a full SVD when
/// k << min(rows, cols); adequate whenever only the dominant subspace is
/// needed. `u` has k columns, `v` has k columns, sigma descending.
struct LeadingSvd {
  Matrix u;
  std::vector<double> sigma;
  Matrix v;
};
LeadingSvd leading_singular_triplets(const Matrix& m, index_t k, bool want_u, bool want_v);

/// Nearest orthogonal matrix in Frobenius norm: U V^T from the SVD of m.
Matrix polar_factor(const Matrix& m);

/// sigma_max / sigma_min; +inf when numerically rank deficient.
double condition_number(const Matrix& m);

/// True when ||m^T m - I||_F <= tol.
bool is_orthogonal(const Matrix& m, double tol);

}  // namespace dc
