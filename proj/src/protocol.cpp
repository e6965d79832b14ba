#include "datacollab/protocol.hpp"

#include <cmath>
#include <string>

#include "datacollab/linalg.hpp"
#include "json.hpp"

namespace dc {

namespace {

// Sub-stream tags; the per-user base stream is pinned to seed ^ splitmix64(i).
constexpr std::uint64_t kAnchorStream = 0;
constexpr std::uint64_t kMeansTag = 0x6d65616e73ULL;
constexpr std::uint64_t kHoldoutTag = 0x686f6c64ULL;

std::uint64_t user_stream(std::uint64_t seed, index_t i) {
  return seed ^ splitmix64(static_cast<std::uint64_t>(i));
}

/// Class means on a sphere of radius 5, drawn once per scenario so all
/// users sample the same mixture.
Matrix blob_means(const ScenarioSpec& spec) {
  Rng rng(splitmix64(spec.seed ^ kMeansTag));
  Matrix means(spec.latent_dim, spec.feature_dim);
  for (index_t k = 0; k < spec.latent_dim; ++k) {
    double norm2 = 0.0;
    for (index_t j = 0; j < spec.feature_dim; ++j) {
      means(k, j) = rng.gaussian();
      norm2 += means(k, j) * means(k, j);
    }
    const double scale = 5.0 / std::sqrt(norm2);
    for (index_t j = 0; j < spec.feature_dim; ++j) means(k, j) *= scale;
  }
  return means;
}

void fill_blob_samples(const Matrix& means, index_t n, std::uint64_t noise_seed, Matrix& x,
                       std::vector<index_t>& labels) {
  const index_t classes = means.rows();
  const index_t dim = means.cols();
  x = Matrix(n, dim);
  labels.resize(static_cast<std::size_t>(n));
  Rng rng(noise_seed);
  for (index_t j = 0; j < n; ++j) {
    const index_t blob = j % classes;
    labels[static_cast<std::size_t>(j)] = blob;
    for (index_t d = 0; d < dim; ++d) x(j, d) = means(blob, d) + rng.gaussian();
  }
}

/// Top-l right singular vectors of x as an m x l matrix.
Matrix dominant_right_basis(const Matrix& x, index_t l) {
  SvdFactors svd = thin_svd(x);
  Matrix v(x.cols(), l);
  for (index_t i = 0; i < x.cols(); ++i)
    for (index_t j = 0; j < l; ++j) v(i, j) = svd.vt(j, i);
  return v;
}

Matrix draw_mixing_factor(BasisCondition condition, index_t l, std::uint64_t seed) {
  const bool orthogonal = condition == BasisCondition::SameSpanOrth ||
                          condition == BasisCondition::DiffSpanOrth;
  if (orthogonal) return haar_orthogonal(l, seed);
  std::uint64_t draw = seed;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix e = Matrix::random_uniform(l, l, draw);
    SvdFactors svd = thin_svd(e);
    if (svd.sigma.back() > kRankCutoff * svd.sigma.front()) return e;
    draw = splitmix64(draw);  // near-singular draw; redraw
  }
  throw NumericalError("mixing factor: repeated near-singular uniform draws");
}

}  // namespace

const char* to_string(BasisCondition c) {
  switch (c) {
    case BasisCondition::SameSpanOrth: return "SameSpanOrth";
    case BasisCondition::SameSpan: return "SameSpan";
    case BasisCondition::DiffSpanOrth: return "DiffSpanOrth";
    case BasisCondition::DiffSpan: return "DiffSpan";
  }
  return "?";
}

BasisCondition basis_condition_from_string(const std::string& s) {
  if (s == "SameSpanOrth") return BasisCondition::SameSpanOrth;
  if (s == "SameSpan") return BasisCondition::SameSpan;
  if (s == "DiffSpanOrth") return BasisCondition::DiffSpanOrth;
  if (s == "DiffSpan") return BasisCondition::DiffSpan;
  throw ValidationError("unknown basis condition: " + s);
}

void ScenarioSpec::validate() const {
  if (users < 1) throw ValidationError("scenario: users must be >= 1");
  if (feature_dim < 1) throw ValidationError("scenario: feature_dim must be >= 1");
  if (latent_dim < 1 || latent_dim > feature_dim)
    throw ValidationError("scenario: requires 1 <= latent_dim <= feature_dim");
  if (anchor_rows <= feature_dim)
    throw ValidationError("scenario: requires anchor_rows > feature_dim");
  if (samples_per_user < 1) throw ValidationError("scenario: samples_per_user must be >= 1");
}

std::string ScenarioSpec::to_json() const {
  nlohmann::json j;
  j["users"] = users;
  j["feature_dim"] = feature_dim;
  j["latent_dim"] = latent_dim;
  j["samples_per_user"] = samples_per_user;
  j["anchor_rows"] = anchor_rows;
  j["condition"] = to_string(condition);
  j["seed"] = seed;
  return j.dump(2);
}

ScenarioSpec ScenarioSpec::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario JSON: ") + e.what());
  }
  ScenarioSpec spec;
  try {
    spec.users = j.at("users").get<index_t>();
    spec.feature_dim = j.at("feature_dim").get<index_t>();
    spec.latent_dim = j.at("latent_dim").get<index_t>();
    spec.samples_per_user = j.at("samples_per_user").get<index_t>();
    spec.anchor_rows = j.at("anchor_rows").get<index_t>();
    spec.condition = basis_condition_from_string(j.at("condition").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

Matrix generate_anchor(index_t a, index_t m, std::uint64_t seed) {
  if (m < 1) throw DimensionError("generate_anchor: feature dim must be >= 1");
  if (a <= m) throw DimensionError("generate_anchor: requires anchor rows a > feature dim m");
  Matrix anchor = Matrix::random_uniform(a, m, seed);
  SvdFactors svd = thin_svd(anchor);
  if (svd.sigma.back() <= 1e-10 * svd.sigma.front())
    throw RankError("generate_anchor: sampled anchor is numerically rank deficient");
  return anchor;
}

Scenario make_scenario(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.samples_per_user < spec.latent_dim)
    throw ValidationError(
        "scenario: samples_per_user must be >= latent_dim for the truncated-SVD basis recipe");

  Scenario scenario;
  scenario.spec = spec;
  scenario.anchor =
      generate_anchor(spec.anchor_rows, spec.feature_dim, spec.seed ^ splitmix64(kAnchorStream));

  const Matrix means = blob_means(spec);
  const bool same_span =
      spec.condition == BasisCondition::SameSpanOrth || spec.condition == BasisCondition::SameSpan;

  scenario.users.resize(static_cast<std::size_t>(spec.users));
  Matrix shared_basis;  // V_1, filled after user 1's data exists
  for (index_t i = 0; i < spec.users; ++i) {
    UserPrivate& user = scenario.users[static_cast<std::size_t>(i)];
    const std::uint64_t base = user_stream(spec.seed, i + 1);
    fill_blob_samples(means, spec.samples_per_user, splitmix64(base ^ 1), user.x, user.labels);
    if (i == 0) shared_basis = dominant_right_basis(user.x, spec.latent_dim);
    user.e = draw_mixing_factor(spec.condition, spec.latent_dim, splitmix64(base ^ 2));
    const Matrix& v = same_span ? shared_basis
                                : (i == 0 ? shared_basis : dominant_right_basis(user.x, spec.latent_dim));
    user.f = matmul(v, user.e);
  }
  return scenario;
}

IntermediateBundle encode_user(const UserPrivate& user, const Matrix& anchor) {
  if (user.x.cols() != user.f.rows())
    throw DimensionError("encode_user: data and basis dimensions do not conform");
  if (anchor.cols() != user.f.rows())
    throw DimensionError("encode_user: anchor and basis dimensions do not conform");
  IntermediateBundle bundle;
  bundle.x_tilde = matmul(user.x, user.f);
  bundle.a_proj = matmul(anchor, user.f);
  bundle.labels = user.labels;
  return bundle;
}

Matrix collude_reconstruct(const Matrix& anchor, const Matrix& a_j) {
  if (anchor.empty()) throw DimensionError("collude_reconstruct: empty anchor");
  if (a_j.rows() != anchor.rows())
    throw DimensionError("collude_reconstruct: projection row count does not match anchor");
  SvdFactors svd = thin_svd(anchor);
  if (anchor.rows() < anchor.cols() || svd.sigma.back() <= kRankCutoff * svd.sigma.front())
    throw RankError("collude_reconstruct: anchor is not full column rank");
  // pinv(A) * A_j assembled from the factors already at hand.
  Matrix ut_aj = matmul_tn(svd.u, a_j);  // k x l
  for (index_t i = 0; i < ut_aj.rows(); ++i)
    for (index_t j = 0; j < ut_aj.cols(); ++j)
      ut_aj(i, j) /= svd.sigma[static_cast<std::size_t>(i)];
  return matmul_tn(svd.vt, ut_aj);
}

HoldoutSample sample_holdout(const ScenarioSpec& spec, index_t count, std::uint64_t salt) {
  spec.validate();
  if (count < 1) throw ValidationError("sample_holdout: count must be >= 1");
  const Matrix means = blob_means(spec);
  HoldoutSample holdout;
  fill_blob_samples(means, count, splitmix64(spec.seed ^ splitmix64(salt) ^ kHoldoutTag),
                    holdout.x, holdout.labels);
  return holdout;
}

}  // namespace dc
