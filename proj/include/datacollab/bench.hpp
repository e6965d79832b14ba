#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "datacollab/alignment.hpp"

namespace dc {

enum class SweepParam { LatentDim, AnchorRows, Users };

const char* to_string(SweepParam p);
SweepParam sweep_param_from_string(const std::string& s);

/// One free parameter swept over an arithmetic range while the other two
/// stay fixed; every grid point is timed `repeats` times and the median is
/// reported. Input generation is excluded from the timings.
struct SweepSpec {
  SweepParam free_param = SweepParam::LatentDim;
  index_t fixed_a = 0;  // ignored when free_param == AnchorRows
  index_t fixed_l = 0;  // ignored when free_param == LatentDim
  index_t fixed_c = 0;  // ignored when free_param == Users
  index_t start = 0;
  index_t step = 0;
  index_t stop = 0;
  index_t repeats = 1;
  std::vector<AlignMethod> methods;
  std::uint64_t seed = 0;

  void validate() const;
  static SweepSpec from_json(const std::string& json_text);
  std::string to_json() const;
};

struct SweepRow {
  AlignMethod method;
  index_t param_value = 0;
  double median_seconds = 0.0;
  bool skipped = false;  // e.g. allocation failure at a large grid point
  std::string skip_reason;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  int threads = 0;
  std::string svd_backend;

  /// Columns: method, free_param, value, median_s, repeats, threads,
  /// svd_backend.
  std::string to_csv() const;
  /// SweepSpec plus a host fingerprint.
  std::string metadata_json() const;
};

/// Anchors are regenerated bit-identically for identical specs; one
/// untimed warm-up run per (method, grid point) precedes measurement.
SweepResult run_sweep(const SweepSpec& spec);

/// The uniform-random anchor projections timed at one grid point, exactly
/// as run_sweep generates them (deterministic in spec.seed and the value).
std::vector<Matrix> sweep_inputs(const SweepSpec& spec, index_t value);

struct FitResult {
  double alpha = 0.0;    // slope
  double kappa = 0.0;    // intercept
  double r_squared = 0.0;
};

/// OLS fit of log10(ts) on log10(xs).
FitResult ols_loglog(const std::vector<double>& xs, const std::vector<double>& ts);

/// Linear-scale OLS: ts ~ intercept + slope * cs. slope is the average
/// extra seconds per additional user.
FitResult ols_linear(const std::vector<double>& cs, const std::vector<double>& ts);
inline FitResult incremental_latency(const std::vector<double>& cs, const std::vector<double>& ts) {
  return ols_linear(cs, ts);
}

/// Thread cap honored by run_sweep (DC_MAX_THREADS) and the CLI; returns
/// the cap actually applied.
int apply_thread_cap(int requested);
int current_thread_cap();

}  // namespace dc
