#include "datacollab/alignment.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "datacollab/linalg.hpp"
#include "json.hpp"

namespace dc {

namespace {

void validate_anchor_list(const std::vector<Matrix>& anchors) {
  if (anchors.empty()) throw DimensionError("alignment: empty anchor list");
  const Matrix& first = anchors.front();
  if (first.empty()) throw DimensionError("alignment: empty anchor matrix");
  if (first.rows() < first.cols())
    throw DimensionError("alignment: anchors must have at least as many rows as columns");
  for (const Matrix& a : anchors) {
    if (!a.same_shape(first)) throw DimensionError("alignment: anchors do not share a shape");
  }
}

/// max over i,j of ||A_i G_i - A_j G_j||_F / max(1, ||A_1 G_1||_F).
double pairwise_anchor_residual(const std::vector<Matrix>& anchors, const std::vector<Matrix>& g) {
  std::vector<Matrix> aligned;
  aligned.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) aligned.push_back(matmul(anchors[i], g[i]));
  const double denom = std::max(1.0, aligned.front().frobenius_norm());
  double worst = 0.0;
  for (std::size_t i = 0; i < aligned.size(); ++i)
    for (std::size_t j = i + 1; j < aligned.size(); ++j)
      worst = std::max(worst, frobenius_distance(aligned[i], aligned[j]));
  return worst / denom;
}

void flag_singular_g(AlignmentResult& result) {
  for (std::size_t i = 0; i < result.g.size(); ++i) {
    SvdFactors svd = thin_svd(result.g[i]);
    if (svd.sigma.back() <= kRankCutoff * std::max(svd.sigma.front(), 1e-300))
      result.notes.push_back("G_" + std::to_string(i + 1) + " is numerically singular");
  }
}

}  // namespace

const char* to_string(AlignMethod m) {
  switch (m) {
    case AlignMethod::Imakura: return "imakura";
    case AlignMethod::Kawakami: return "kawakami";
    case AlignMethod::ODC: return "odc";
  }
  return "?";
}

AlignMethod align_method_from_string(const std::string& s) {
  if (s == "imakura") return AlignMethod::Imakura;
  if (s == "kawakami") return AlignMethod::Kawakami;
  if (s == "odc") return AlignMethod::ODC;
  throw ValidationError("unknown alignment method: " + s);
}

AlignmentResult align_imakura(const std::vector<Matrix>& anchors, const Matrix& r,
                              const AlignOptions& opts) {
  validate_anchor_list(anchors);
  const index_t l = anchors.front().cols();
  if (r.rows() != l || r.cols() != l)
    throw DimensionError("align_imakura: target factor must be l x l");
  {
    SvdFactors svd = thin_svd(r);
    if (svd.sigma.back() <= kRankCutoff * std::max(svd.sigma.front(), 1e-300))
      throw SingularError("align_imakura: target factor R is singular");
  }

  // Dominant left subspace of the concatenated anchor, then Z = U R and
  // per-user least-squares fits G_i = pinv(A_i) Z.
  const Matrix concat = hcat(anchors);
  const Matrix u = leading_singular_triplets(concat, l, /*want_u=*/true, /*want_v=*/false).u;
  const Matrix z = matmul(u, r);

  AlignmentResult result;
  result.method = AlignMethod::Imakura;
  result.target = r;
  result.g.reserve(anchors.size());
  for (const Matrix& anchor : anchors) result.g.push_back(matmul(pinv(anchor), z));

  if (opts.diagnostics) {
    result.anchor_residual = pairwise_anchor_residual(anchors, result.g);
    flag_singular_g(result);
  }
  return result;
}

AlignmentResult align_imakura(const std::vector<Matrix>& anchors, const Matrix& r) {
  return align_imakura(anchors, r, AlignOptions{});
}

AlignmentResult align_kawakami(const std::vector<Matrix>& anchors, const AlignOptions& opts) {
  validate_anchor_list(anchors);
  const index_t l = anchors.front().cols();
  const index_t c = static_cast<index_t>(anchors.size());

  std::vector<QrFactors> qr;
  qr.reserve(anchors.size());
  std::vector<Matrix> q_blocks;
  q_blocks.reserve(anchors.size());
  for (const Matrix& anchor : anchors) {
    qr.push_back(thin_qr(anchor));
    q_blocks.push_back(qr.back().q_factor);
  }

  // Right singular vectors of [Q_1 ... Q_c] for the largest singular
  // values, one column per aligned feature.
  const Matrix concat_q = hcat(q_blocks);
  const Matrix v = leading_singular_triplets(concat_q, l, /*want_u=*/false, /*want_v=*/true).v;

  AlignmentResult result;
  result.method = AlignMethod::Kawakami;
  result.g.assign(static_cast<std::size_t>(c), Matrix(l, l));
  std::vector<double> rhs(static_cast<std::size_t>(l));
  for (index_t i = 0; i < c; ++i) {
    for (index_t k = 0; k < l; ++k) {
      for (index_t t = 0; t < l; ++t) rhs[static_cast<std::size_t>(t)] = v(i * l + t, k);
      // Recover g_{i,k} from R_i g = ghat by back substitution, never via
      // an explicit triangular inverse.
      const std::vector<double> g_col = solve_upper_triangular(qr[static_cast<std::size_t>(i)].r_factor, rhs);
      for (index_t t = 0; t < l; ++t) result.g[static_cast<std::size_t>(i)](t, k) = g_col[static_cast<std::size_t>(t)];
    }
  }

  if (opts.diagnostics) {
    result.anchor_residual = pairwise_anchor_residual(anchors, result.g);
    flag_singular_g(result);
  }
  return result;
}

AlignmentResult align_kawakami(const std::vector<Matrix>& anchors) {
  return align_kawakami(anchors, AlignOptions{});
}

AlignmentResult align_odc(const std::vector<Matrix>& anchors, const Matrix& o,
                          const AlignOptions& opts) {
  validate_anchor_list(anchors);
  const index_t l = anchors.front().cols();
  if (o.rows() != l || o.cols() != l) throw DimensionError("align_odc: target must be l x l");
  if (!is_orthogonal(o, 1e-10))
    throw ValidationError("align_odc: supplied target is not orthogonal");

  AlignmentResult result;
  result.method = AlignMethod::ODC;
  result.target = o;
  result.g.reserve(anchors.size());

  const Matrix a1o = matmul(anchors.front(), o);
  bool degenerate = false;
  for (const Matrix& anchor : anchors) {
    SvdFactors svd = thin_svd(matmul_tn(anchor, a1o));
    if (svd.sigma.back() <= kRankCutoff * std::max(svd.sigma.front(), 1e-300)) degenerate = true;
    result.g.push_back(matmul(svd.u, svd.vt));
  }

  if (opts.diagnostics) {
    result.anchor_residual = pairwise_anchor_residual(anchors, result.g);
    if (degenerate)
      result.notes.push_back(
          "rank-deficient cross product: polar factor not unique, residual is diagnostic");
  }
  return result;
}

AlignmentResult align_odc(const std::vector<Matrix>& anchors, const Matrix& o) {
  return align_odc(anchors, o, AlignOptions{});
}

AlignmentResult align_odc(const std::vector<Matrix>& anchors, std::uint64_t target_seed) {
  validate_anchor_list(anchors);
  AlignmentResult result =
      align_odc(anchors, haar_orthogonal(anchors.front().cols(), target_seed));
  result.target_seed = target_seed;
  return result;
}

ConcordanceReport concordance_report_parts(const std::vector<Matrix>& f,
                                           const std::vector<Matrix>& g, AlignMethod method,
                                           const std::optional<Matrix>& o_used) {
  if (f.empty() || f.size() != g.size())
    throw DimensionError("concordance: secret-basis and change-of-basis counts differ");

  std::vector<Matrix> fg;
  fg.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fg.push_back(matmul(f[i], g[i]));

  ConcordanceReport report;
  const double denom = fg.front().frobenius_norm();
  double worst = 0.0;
  for (std::size_t i = 1; i < fg.size(); ++i)
    worst = std::max(worst, frobenius_distance(fg[i], fg.front()));
  report.basis_residual =
      denom > 0.0 ? worst / denom
                  : (worst == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

  if (method == AlignMethod::ODC && o_used.has_value()) {
    // Theory predicts G_i = E_i^T O with E_i the relative factor between
    // the secret bases, recovered as pinv(F_1) F_i.
    const Matrix f1_pinv = pinv(f.front());
    double worst_check = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Matrix e_i = matmul(f1_pinv, f[i]);
      const Matrix predicted = matmul_tn(e_i, *o_used);
      worst_check = std::max(worst_check, frobenius_distance(g[i], predicted));
    }
    report.theoretical_check = worst_check;
  }

  report.satisfied = report.basis_residual <= 1e-8 &&
                     (!report.theoretical_check || *report.theoretical_check <= 1e-8);
  return report;
}

ConcordanceReport concordance_report(const std::vector<UserPrivate>& users,
                                     const AlignmentResult& result,
                                     const std::optional<Matrix>& o_used) {
  std::vector<Matrix> f;
  f.reserve(users.size());
  for (const UserPrivate& user : users) f.push_back(user.f);
  std::optional<Matrix> o = o_used;
  if (!o && result.method == AlignMethod::ODC && !result.target.empty()) o = result.target;
  return concordance_report_parts(f, result.g, result.method, o);
}

std::string ConcordanceReport::to_json() const {
  nlohmann::json j;
  j["basis_residual"] = basis_residual;
  if (theoretical_check)
    j["theoretical_check"] = *theoretical_check;
  else
    j["theoretical_check"] = nullptr;
  j["satisfied"] = satisfied;
  return j.dump(2);
}

double common_rotation_residual(const std::vector<Matrix>& left,
                                const std::vector<Matrix>& right) {
  if (left.empty() || left.size() != right.size())
    throw DimensionError("common_rotation_residual: list sizes differ");
  for (std::size_t i = 0; i < left.size(); ++i)
    if (!left[i].same_shape(right[i]))
      throw DimensionError("common_rotation_residual: shape mismatch at index " +
                           std::to_string(i));

  const Matrix stacked_left = vcat(left);
  const Matrix stacked_right = vcat(right);
  const Matrix rotation = polar_factor(matmul_tn(stacked_left, stacked_right));
  const double residual = frobenius_distance(matmul(stacked_left, rotation), stacked_right);
  return residual / std::max(1.0, stacked_right.frobenius_norm());
}

}  // namespace dc
