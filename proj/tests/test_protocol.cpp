#include <cmath>

#include "datacollab/linalg.hpp"
#include "datacollab/protocol.hpp"
#include "doctest.h"

using dc::BasisCondition;
using dc::Matrix;
using dc::ScenarioSpec;

namespace {

ScenarioSpec small_spec(BasisCondition condition, std::uint64_t seed, dc::index_t users = 3) {
  ScenarioSpec spec;
  spec.users = users;
  spec.feature_dim = 12;
  spec.latent_dim = 3;
  spec.samples_per_user = 40;
  spec.anchor_rows = 20;
  spec.condition = condition;
  spec.seed = seed;
  return spec;
}

double gram_identity_error(const Matrix& f) {
  Matrix g = matmul_tn(f, f);
  for (dc::index_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return g.frobenius_norm();
}

}  // namespace

TEST_CASE("generate_anchor: contract and error cases") {
  const Matrix anchor = dc::generate_anchor(4, 2, 7);
  CHECK(anchor.rows() == 4);
  CHECK(anchor.cols() == 2);
  for (double v : anchor.data()) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  const auto svd = dc::thin_svd(anchor);
  CHECK(svd.sigma.back() > 1e-10 * svd.sigma.front());

  CHECK_THROWS_AS(dc::generate_anchor(2, 3, 1), dc::DimensionError);
  CHECK_THROWS_AS(dc::generate_anchor(3, 3, 1), dc::DimensionError);
}

TEST_CASE("generate_anchor: large instance keeps full column rank") {
  const Matrix anchor = dc::generate_anchor(1000, 784, 1);
  const auto svd = dc::thin_svd(anchor);
  CHECK(svd.sigma.back() / svd.sigma.front() > 1e-10);
}

TEST_CASE("scenario spec validation and JSON round-trip") {
  ScenarioSpec spec = small_spec(BasisCondition::SameSpan, 5);
  const ScenarioSpec back = ScenarioSpec::from_json(spec.to_json());
  CHECK(back.users == spec.users);
  CHECK(back.feature_dim == spec.feature_dim);
  CHECK(back.latent_dim == spec.latent_dim);
  CHECK(back.samples_per_user == spec.samples_per_user);
  CHECK(back.anchor_rows == spec.anchor_rows);
  CHECK(back.condition == spec.condition);
  CHECK(back.seed == spec.seed);

  ScenarioSpec bad = spec;
  bad.latent_dim = bad.feature_dim + 1;
  CHECK_THROWS_AS(bad.validate(), dc::ValidationError);
  bad = spec;
  bad.anchor_rows = bad.feature_dim;  // needs a > m
  CHECK_THROWS_AS(bad.validate(), dc::ValidationError);
  CHECK_THROWS_AS(ScenarioSpec::from_json("{\"users\": 1}"), dc::ValidationError);
  CHECK_THROWS_AS(dc::basis_condition_from_string("Sideways"), dc::ValidationError);
}

TEST_CASE("SameSpanOrth: orthonormal bases spanning one subspace") {
  const dc::Scenario scenario = make_scenario(small_spec(BasisCondition::SameSpanOrth, 11));
  const Matrix& f1 = scenario.users.front().f;
  for (const dc::UserPrivate& user : scenario.users) {
    CHECK(gram_identity_error(user.f) < 1e-10);
    // Identical span, witnessed by projection onto col(F_1).
    const Matrix projected = matmul(f1, matmul_tn(f1, user.f));
    CHECK(dc::frobenius_distance(projected, user.f) < 1e-8 * user.f.frobenius_norm());
  }
}

TEST_CASE("SameSpan: identical span but visibly non-orthonormal factors") {
  const dc::Scenario scenario = make_scenario(small_spec(BasisCondition::SameSpan, 13));
  const Matrix& f1 = scenario.users.front().f;
  const Matrix projector = matmul(f1, dc::pinv(f1));
  bool some_non_orthonormal = false;
  for (const dc::UserPrivate& user : scenario.users) {
    CHECK(dc::frobenius_distance(matmul(projector, user.f), user.f) <
          1e-8 * user.f.frobenius_norm());
    if (gram_identity_error(user.f) > 0.1) some_non_orthonormal = true;
  }
  CHECK(some_non_orthonormal);
}

TEST_CASE("DiffSpanOrth: distinct users get a positive principal angle") {
  const dc::Scenario scenario =
      make_scenario(small_spec(BasisCondition::DiffSpanOrth, 17, /*users=*/2));
  for (const dc::UserPrivate& user : scenario.users) CHECK(gram_identity_error(user.f) < 1e-10);
  // Principal angles between the two column spaces: the singular values of
  // F_1^T F_2 are their cosines.
  const auto svd = dc::thin_svd(matmul_tn(scenario.users[0].f, scenario.users[1].f));
  CHECK(svd.sigma.back() < 1.0 - 1e-6);
}

TEST_CASE("mixing factors are invertible in every condition") {
  for (BasisCondition condition : {BasisCondition::SameSpanOrth, BasisCondition::SameSpan,
                                   BasisCondition::DiffSpanOrth, BasisCondition::DiffSpan}) {
    const dc::Scenario scenario = make_scenario(small_spec(condition, 23));
    for (const dc::UserPrivate& user : scenario.users) {
      const auto svd = dc::thin_svd(user.e);
      CHECK(svd.sigma.back() > 1e-12 * svd.sigma.front());
    }
  }
}

TEST_CASE("labels are the blob index and every class is populated") {
  const dc::Scenario scenario = make_scenario(small_spec(BasisCondition::DiffSpan, 29));
  for (const dc::UserPrivate& user : scenario.users) {
    std::vector<int> counts(static_cast<std::size_t>(scenario.spec.latent_dim), 0);
    for (dc::index_t label : user.labels) {
      REQUIRE(label >= 0);
      REQUIRE(label < scenario.spec.latent_dim);
      ++counts[static_cast<std::size_t>(label)];
    }
    for (int c : counts) CHECK(c > 0);
  }
}

TEST_CASE("encode_user: column selector, zero data, definitional identity") {
  // f = first-l-columns-of-identity selector (m=3, l=2).
  dc::UserPrivate user;
  user.x = Matrix(2, 3, {1, 2, 3, 4, 5, 6});
  user.labels = {0, 1};
  user.f = Matrix(3, 2, {1, 0, 0, 1, 0, 0});
  user.e = Matrix::identity(2);
  const Matrix anchor = dc::generate_anchor(4, 3, 3);

  const dc::IntermediateBundle bundle = dc::encode_user(user, anchor);
  CHECK(bundle.x_tilde == Matrix(2, 2, {1, 2, 4, 5}));
  CHECK(bundle.a_proj == matmul(anchor, user.f));  // exact, definitional

  user.x = Matrix(2, 3);
  const dc::IntermediateBundle zero_bundle = dc::encode_user(user, anchor);
  CHECK(zero_bundle.x_tilde.frobenius_norm() == 0.0);

  user.f = Matrix(4, 2);
  CHECK_THROWS_AS(dc::encode_user(user, anchor), dc::DimensionError);
}

TEST_CASE("collude_reconstruct: orthonormal anchor, zero projection") {
  const Matrix q = dc::thin_qr(Matrix::random_gaussian(12, 4, 19)).q_factor;
  const Matrix f = Matrix::random_gaussian(4, 2, 20);
  const Matrix recovered = dc::collude_reconstruct(q, matmul(q, f));
  CHECK(dc::frobenius_distance(recovered, f) < 1e-10);

  const Matrix zero = dc::collude_reconstruct(q, Matrix(12, 2));
  CHECK(zero.frobenius_norm() == 0.0);
}

TEST_CASE("collude_reconstruct: recovers the secret basis on seeded instances") {
  // The privacy boundary collapses under analyst-user collusion: given the
  // raw anchor, pinv(A) A_j reproduces F_j.
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const Matrix anchor = dc::generate_anchor(50, 10, 7000 + trial);
    const Matrix f = Matrix::random_gaussian(10, 4, 8000 + trial);
    const Matrix recovered = dc::collude_reconstruct(anchor, matmul(anchor, f));
    REQUIRE(dc::frobenius_distance(recovered, f) / f.frobenius_norm() <= 1e-8);
  }
}

TEST_CASE("collude_reconstruct: error cases") {
  Matrix wide(2, 4);
  for (dc::index_t j = 0; j < 4; ++j) wide(0, j) = 1.0;
  CHECK_THROWS_AS(dc::collude_reconstruct(wide, Matrix(2, 1)), dc::RankError);
  CHECK_THROWS_AS(dc::collude_reconstruct(dc::generate_anchor(6, 2, 1), Matrix(5, 1)),
                  dc::DimensionError);
}

TEST_CASE("scenario construction is deterministic and stable under user growth") {
  const ScenarioSpec spec = small_spec(BasisCondition::SameSpanOrth, 31);
  const dc::Scenario a = make_scenario(spec);
  const dc::Scenario b = make_scenario(spec);
  CHECK(a.anchor == b.anchor);
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].x == b.users[i].x);
    CHECK(a.users[i].f == b.users[i].f);
    CHECK(a.users[i].e == b.users[i].e);
    CHECK(a.users[i].labels == b.users[i].labels);
  }

  ScenarioSpec grown = spec;
  grown.users = spec.users + 2;
  const dc::Scenario c = make_scenario(grown);
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].x == c.users[i].x);
    CHECK(a.users[i].e == c.users[i].e);
  }
}

TEST_CASE("sample_holdout: deterministic, fresh noise, same blobs") {
  const ScenarioSpec spec = small_spec(BasisCondition::SameSpanOrth, 37);
  const dc::HoldoutSample h1 = dc::sample_holdout(spec, 24, 1);
  const dc::HoldoutSample h2 = dc::sample_holdout(spec, 24, 1);
  CHECK(h1.x == h2.x);
  CHECK(h1.labels == h2.labels);
  const dc::HoldoutSample h3 = dc::sample_holdout(spec, 24, 2);
  CHECK_FALSE(h1.x == h3.x);

  // Holdout points cluster around the same means as the training blobs:
  // class-0 holdout points are closer to the class-0 training mean.
  const dc::Scenario scenario = make_scenario(spec);
  const Matrix& x = scenario.users[0].x;
  std::vector<double> mean0(static_cast<std::size_t>(x.cols()), 0.0);
  int n0 = 0;
  for (dc::index_t i = 0; i < x.rows(); ++i) {
    if (scenario.users[0].labels[static_cast<std::size_t>(i)] != 0) continue;
    ++n0;
    for (dc::index_t j = 0; j < x.cols(); ++j) mean0[static_cast<std::size_t>(j)] += x(i, j);
  }
  for (double& v : mean0) v /= n0;
  int closer = 0, total = 0;
  for (dc::index_t i = 0; i < h1.x.rows(); ++i) {
    if (h1.labels[static_cast<std::size_t>(i)] != 0) continue;
    double d = 0.0, dref = 0.0;
    for (dc::index_t j = 0; j < h1.x.cols(); ++j) {
      d += (h1.x(i, j) - mean0[static_cast<std::size_t>(j)]) *
           (h1.x(i, j) - mean0[static_cast<std::size_t>(j)]);
      dref += h1.x(i, j) * h1.x(i, j);  // distance to the origin as a control
    }
    ++total;
    if (d < dref) ++closer;
  }
  CHECK(total > 0);
  CHECK(closer == total);
}
