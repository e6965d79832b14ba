#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datacollab/matrix.hpp"
#include "datacollab/protocol.hpp"

namespace dc {

enum class AlignMethod {
  Imakura,
  Kawakami,
  ODC,
};

const char* to_string(AlignMethod m);
AlignMethod align_method_from_string(const std::string& s);

/// Change-of-basis matrices for all users plus diagnostics.
struct AlignmentResult {
  std::vector<Matrix> g;  // c matrices, each l x l
  AlignMethod method = AlignMethod::ODC;
  /// The R (Imakura) or O (ODC) actually used; empty for Kawakami.
  Matrix target;
  std::optional<std::uint64_t> target_seed;
  /// max over i,j of ||A_i G_i - A_j G_j||_F / max(1, ||A_1 G_1||_F).
  double anchor_residual = 0.0;
  /// Degeneracies observed outside the methods' assumptions (e.g. a
  /// numerically singular G_i under Imakura). Never errors: the baselines
  /// are routinely run outside their assumptions.
  std::vector<std::string> notes;
};

/// Diagnostics against the hidden secret bases; test/offline use only.
struct ConcordanceReport {
  /// max over i of ||F_i G_i - F_1 G_1||_F / ||F_1 G_1||_F.
  double basis_residual = 0.0;
  /// max over i of ||G_i - E_i^T O||_F with E_i = pinv(F_1) F_i; only
  /// computed for ODC when the target O is available.
  std::optional<double> theoretical_check;
  bool satisfied = false;

  std::string to_json() const;
};

/// Targets Z = U R where U spans the dominant subspace of the concatenated
/// anchor projections, then solves each user's least-squares fit.
AlignmentResult align_imakura(const std::vector<Matrix>& anchors, const Matrix& r);

/// Target-free variant: QR per user, one SVD of the concatenated Q blocks,
/// per-column back substitution. The column-wise normalization
/// sum_i ||A_i g_{i,k}||^2 = 1 holds by construction.
AlignmentResult align_kawakami(const std::vector<Matrix>& anchors);

/// Orthogonal Procrustes against A_1 O: G_i is the polar factor of
/// A_i^T A_1 O, hence orthogonal. Supply the target or a seed to sample it
/// Haar-uniformly.
AlignmentResult align_odc(const std::vector<Matrix>& anchors, const Matrix& o);
AlignmentResult align_odc(const std::vector<Matrix>& anchors, std::uint64_t target_seed);

/// With diagnostics off, the O(c^2) residual sweep and per-user
/// degeneracy checks are skipped so timings reflect the alignment
/// computation alone (the benchmark path).
struct AlignOptions {
  bool diagnostics = true;
};
AlignmentResult align_imakura(const std::vector<Matrix>& anchors, const Matrix& r,
                              const AlignOptions& opts);
AlignmentResult align_kawakami(const std::vector<Matrix>& anchors, const AlignOptions& opts);
AlignmentResult align_odc(const std::vector<Matrix>& anchors, const Matrix& o,
                          const AlignOptions& opts);

ConcordanceReport concordance_report(const std::vector<UserPrivate>& users,
                                     const AlignmentResult& result,
                                     const std::optional<Matrix>& o_used = std::nullopt);

/// Same report computed from bare matrices (file-based flows): f[i] are the
/// secret bases, g[i] the change-of-basis matrices.
ConcordanceReport concordance_report_parts(const std::vector<Matrix>& f,
                                           const std::vector<Matrix>& g, AlignMethod method,
                                           const std::optional<Matrix>& o_used = std::nullopt);

/// Stacks both lists vertically, solves one orthogonal Procrustes between
/// the stacks and returns the relative residual: ~0 iff the two alignments
/// differ by a single common orthogonal transform.
double common_rotation_residual(const std::vector<Matrix>& left, const std::vector<Matrix>& right);

}  // namespace dc
