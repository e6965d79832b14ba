#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "datacollab/matrix.hpp"

namespace dc {

/// The four secret-basis regimes: whether all users draw their basis from
/// user 1's dominant subspace or from their own, and whether the mixing
/// factor is orthogonal or a plain uniform random matrix.
enum class BasisCondition {
  SameSpanOrth,
  SameSpan,
  DiffSpanOrth,
  DiffSpan,
};

const char* to_string(BasisCondition c);
BasisCondition basis_condition_from_string(const std::string& s);

/// Fully determines a synthetic collaboration instance.
struct ScenarioSpec {
  index_t users = 0;             // c
  index_t feature_dim = 0;       // m
  index_t latent_dim = 0;        // l, l <= m
  index_t samples_per_user = 0;  // n_i
  index_t anchor_rows = 0;       // a, a > m
  BasisCondition condition = BasisCondition::SameSpanOrth;
  std::uint64_t seed = 0;

  void validate() const;

  std::string to_json() const;
  static ScenarioSpec from_json(const std::string& json_text);
};

/// Everything user i keeps local: raw data, labels, the secret basis and
/// the mixing factor it was built from.
struct UserPrivate {
  Matrix x;                     // n_i x m
  std::vector<index_t> labels;  // length n_i, blob index
  Matrix f;                     // m x l secret basis
  Matrix e;                     // l x l mixing factor
};

/// What user i shares with the analyst.
struct IntermediateBundle {
  Matrix x_tilde;  // n_i x l
  Matrix a_proj;   // a x l, the anchor pushed through the secret basis
  std::vector<index_t> labels;
};

struct Scenario {
  ScenarioSpec spec;
  Matrix anchor;  // a x m
  std::vector<UserPrivate> users;
};

/// Anchor matrix with i.i.d. entries uniform on [0,1), verified to have
/// full column rank.
Matrix generate_anchor(index_t a, index_t m, std::uint64_t seed);

/// Builds the full synthetic instance. Per-user streams are derived as
/// seed ^ splitmix64(i) so adding users never perturbs earlier users.
Scenario make_scenario(const ScenarioSpec& spec);

IntermediateBundle encode_user(const UserPrivate& user, const Matrix& anchor);

/// What a user colluding with the analyst can do: recover user j's secret
/// basis from the raw anchor and the shared anchor projection.
Matrix collude_reconstruct(const Matrix& anchor, const Matrix& a_j);

/// Fresh samples from the same class blobs as the scenario (means depend
/// only on spec.seed), with noise drawn from a salt-derived stream. Used
/// for held-out evaluation.
struct HoldoutSample {
  Matrix x;
  std::vector<index_t> labels;
};
HoldoutSample sample_holdout(const ScenarioSpec& spec, index_t count, std::uint64_t salt);

}  // namespace dc
