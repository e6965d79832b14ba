#include <cmath>
#include <sstream>

#include "datacollab/bench.hpp"
#include "datacollab/rng.hpp"
#include "doctest.h"
#include "json.hpp"

using dc::FitResult;
using dc::SweepSpec;

namespace {

SweepSpec tiny_sweep() {
  SweepSpec spec;
  spec.free_param = dc::SweepParam::LatentDim;
  spec.fixed_a = 40;
  spec.fixed_c = 3;
  spec.start = 4;
  spec.step = 4;
  spec.stop = 12;
  spec.repeats = 2;
  spec.methods = {dc::AlignMethod::Imakura, dc::AlignMethod::Kawakami, dc::AlignMethod::ODC};
  spec.seed = 5;
  return spec;
}

}  // namespace

TEST_CASE("ols_loglog: exact power laws are recovered to 1e-10") {
  std::vector<double> xs, ts;
  for (int i = 1; i <= 12; ++i) {
    xs.push_back(10.0 * i);
    ts.push_back(5.0 * std::pow(10.0 * i, 2.0));
  }
  const FitResult fit = dc::ols_loglog(xs, ts);
  CHECK(fit.alpha == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.kappa == doctest::Approx(std::log10(5.0)).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ols_loglog: constant series has zero slope") {
  const std::vector<double> xs{1, 2, 4, 8};
  const std::vector<double> ts{3, 3, 3, 3};
  const FitResult fit = dc::ols_loglog(xs, ts);
  CHECK(fit.alpha == 0.0);
  CHECK(fit.r_squared == 1.0);
}

TEST_CASE("ols_loglog: 1% multiplicative noise keeps the exponent within 0.05") {
  dc::Rng rng(2718);
  for (double exponent : {0.5, 1.0, 1.75, 2.0}) {
    std::vector<double> xs, ts;
    for (int i = 1; i <= 20; ++i) {
      const double x = 5.0 * i;
      xs.push_back(x);
      ts.push_back(3.0 * std::pow(x, exponent) * (1.0 + 0.01 * (2.0 * rng.uniform() - 1.0)));
    }
    const FitResult fit = dc::ols_loglog(xs, ts);
    CHECK(fit.alpha == doctest::Approx(exponent).epsilon(0.05 / exponent));
  }
}

TEST_CASE("ols_loglog: error paths") {
  CHECK_THROWS_AS(dc::ols_loglog({1, 2}, {1, 2}), dc::ValidationError);
  CHECK_THROWS_AS(dc::ols_loglog({1, 2, 3}, {1, -2, 3}), dc::ValidationError);
  CHECK_THROWS_AS(dc::ols_loglog({2, 2, 2}, {1, 2, 3}), dc::FitError);
  CHECK_THROWS_AS(dc::ols_loglog({1, 2, 3}, {1, 2}), dc::DimensionError);
}

TEST_CASE("ols_linear: exact affine recovery") {
  const std::vector<double> cs{50, 100, 150, 200};
  std::vector<double> ts;
  for (double c : cs) ts.push_back(0.001 * c);
  const FitResult proportional = dc::incremental_latency(cs, ts);
  CHECK(proportional.alpha == doctest::Approx(0.001).epsilon(1e-10));
  CHECK(proportional.kappa == doctest::Approx(0.0).epsilon(1e-10));

  ts.clear();
  for (double c : cs) ts.push_back(2.0 + 0.003 * c);
  const FitResult affine = dc::incremental_latency(cs, ts);
  CHECK(affine.alpha == doctest::Approx(0.003).epsilon(1e-10));
  CHECK(affine.kappa == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(affine.r_squared == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sweep spec: validation and JSON round-trip") {
  const SweepSpec spec = tiny_sweep();
  const SweepSpec back = SweepSpec::from_json(spec.to_json());
  CHECK(back.free_param == spec.free_param);
  CHECK(back.fixed_a == spec.fixed_a);
  CHECK(back.fixed_c == spec.fixed_c);
  CHECK(back.start == spec.start);
  CHECK(back.stop == spec.stop);
  CHECK(back.repeats == spec.repeats);
  CHECK(back.methods == spec.methods);

  SweepSpec bad = spec;
  bad.stop = 2;
  CHECK_THROWS_AS(bad.validate(), dc::ValidationError);
  bad = spec;
  bad.stop = 80;  // l would exceed a
  CHECK_THROWS_AS(bad.validate(), dc::ValidationError);
  bad = spec;
  bad.methods.clear();
  CHECK_THROWS_AS(bad.validate(), dc::ValidationError);
}

TEST_CASE("run_sweep: table shape, ordering and CSV format") {
  const dc::SweepResult result = dc::run_sweep(tiny_sweep());
  REQUIRE(result.rows.size() == 9);  // 3 grid points x 3 methods
  dc::index_t last_value = 0;
  for (const dc::SweepRow& row : result.rows) {
    CHECK(row.param_value >= last_value);  // ordered by the free parameter
    last_value = row.param_value;
    CHECK_FALSE(row.skipped);
    CHECK(row.median_seconds >= 0.0);
  }
  CHECK(result.threads >= 1);

  std::istringstream csv(result.to_csv());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "method,free_param,value,median_s,repeats,threads,svd_backend");
  int lines = 0;
  for (std::string line; std::getline(csv, line);)
    if (!line.empty()) ++lines;
  CHECK(lines == 9);

  const auto meta = nlohmann::json::parse(result.metadata_json());
  CHECK(meta["threads"].get<int>() == result.threads);
  CHECK(meta["sweep"]["range"]["stop"].get<int>() == 12);
  CHECK(meta["svd_backend"].get<std::string>().find("exact") != std::string::npos);
}

TEST_CASE("run_sweep: inputs are regenerated bit-identically for one spec") {
  SweepSpec spec = tiny_sweep();
  for (dc::index_t value = spec.start; value <= spec.stop; value += spec.step) {
    const std::vector<dc::Matrix> a = dc::sweep_inputs(spec, value);
    const std::vector<dc::Matrix> b = dc::sweep_inputs(spec, value);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
  }
  // Different seeds give different inputs.
  SweepSpec other = spec;
  other.seed = spec.seed + 1;
  CHECK_FALSE(dc::sweep_inputs(spec, spec.start).front() ==
              dc::sweep_inputs(other, other.start).front());
}

TEST_CASE("run_sweep: single repeat median equals the lone measurement") {
  SweepSpec spec = tiny_sweep();
  spec.start = spec.stop = 4;
  spec.repeats = 1;
  spec.methods = {dc::AlignMethod::ODC};
  const dc::SweepResult result = dc::run_sweep(spec);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows.front().median_seconds > 0.0);
}
