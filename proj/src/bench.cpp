#include "datacollab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "datacollab/linalg.hpp"
#include "json.hpp"

extern "C" void openblas_set_num_threads(int);

namespace dc {

namespace {

int g_thread_cap = 0;  // 0 = untouched library default

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct GridPoint {
  index_t a;
  index_t l;
  index_t c;
};

GridPoint grid_point(const SweepSpec& spec, index_t value) {
  switch (spec.free_param) {
    case SweepParam::LatentDim: return {spec.fixed_a, value, spec.fixed_c};
    case SweepParam::AnchorRows: return {value, spec.fixed_l, spec.fixed_c};
    case SweepParam::Users: return {spec.fixed_a, spec.fixed_l, value};
  }
  throw ValidationError("sweep: unknown free parameter");
}

void run_method_once(AlignMethod method, const std::vector<Matrix>& anchors, const Matrix& identity,
                     const Matrix& odc_target) {
  const AlignOptions timing_opts{.diagnostics = false};
  switch (method) {
    case AlignMethod::Imakura: align_imakura(anchors, identity, timing_opts); break;
    case AlignMethod::Kawakami: align_kawakami(anchors, timing_opts); break;
    case AlignMethod::ODC: align_odc(anchors, odc_target, timing_opts); break;
  }
}

}  // namespace

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::LatentDim: return "l";
    case SweepParam::AnchorRows: return "a";
    case SweepParam::Users: return "c";
  }
  return "?";
}

SweepParam sweep_param_from_string(const std::string& s) {
  if (s == "l") return SweepParam::LatentDim;
  if (s == "a") return SweepParam::AnchorRows;
  if (s == "c") return SweepParam::Users;
  throw ValidationError("unknown sweep parameter: " + s + " (expected l, a or c)");
}

void SweepSpec::validate() const {
  if (start < 1 || step < 1 || stop < start) throw ValidationError("sweep: empty or invalid range");
  if (repeats < 1) throw ValidationError("sweep: repeats must be >= 1");
  if (methods.empty()) throw ValidationError("sweep: no methods selected");
  for (index_t v = start; v <= stop; v += step) {
    const GridPoint dims = grid_point(*this, v);
    if (dims.a < 1 || dims.l < 1 || dims.c < 1)
      throw ValidationError("sweep: grid point with non-positive dimension");
    if (dims.a < dims.l)
      throw ValidationError("sweep: grid point with a < l (anchors would be wide)");
  }
}

SweepSpec SweepSpec::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sweep JSON: ") + e.what());
  }
  SweepSpec spec;
  try {
    spec.free_param = sweep_param_from_string(j.at("free_param").get<std::string>());
    const auto& fixed = j.at("fixed");
    spec.fixed_a = fixed.value("a", static_cast<index_t>(0));
    spec.fixed_l = fixed.value("l", static_cast<index_t>(0));
    spec.fixed_c = fixed.value("c", static_cast<index_t>(0));
    const auto& range = j.at("range");
    spec.start = range.at("start").get<index_t>();
    spec.step = range.at("step").get<index_t>();
    spec.stop = range.at("stop").get<index_t>();
    spec.repeats = j.value("repeats", static_cast<index_t>(1));
    for (const auto& name : j.at("methods"))
      spec.methods.push_back(align_method_from_string(name.get<std::string>()));
    spec.seed = j.value("seed", static_cast<std::uint64_t>(0));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sweep JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string SweepSpec::to_json() const {
  nlohmann::json j;
  j["free_param"] = to_string(free_param);
  nlohmann::json fixed = nlohmann::json::object();
  if (free_param != SweepParam::AnchorRows) fixed["a"] = fixed_a;
  if (free_param != SweepParam::LatentDim) fixed["l"] = fixed_l;
  if (free_param != SweepParam::Users) fixed["c"] = fixed_c;
  j["fixed"] = fixed;
  j["range"] = {{"start", start}, {"step", step}, {"stop", stop}};
  j["repeats"] = repeats;
  nlohmann::json method_names = nlohmann::json::array();
  for (AlignMethod m : methods) method_names.push_back(to_string(m));
  j["methods"] = method_names;
  j["seed"] = seed;
  return j.dump(2);
}

int apply_thread_cap(int requested) {
  const int hardware = static_cast<int>(std::thread::hardware_concurrency());
  int cap = requested > 0 ? requested : (hardware > 0 ? hardware : 1);
  openblas_set_num_threads(cap);
  g_thread_cap = cap;
  return cap;
}

int current_thread_cap() { return g_thread_cap; }

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();

  int requested = g_thread_cap;
  if (const char* env = std::getenv("DC_MAX_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) requested = parsed;
  }
  SweepResult result;
  result.spec = spec;
  result.threads = apply_thread_cap(requested);
  result.svd_backend = "openblas-lapacke (exact: dgesdd; gram+dsyevr for leading vectors)";

  using clock = std::chrono::steady_clock;
  for (index_t value = spec.start; value <= spec.stop; value += spec.step) {
    const GridPoint dims = grid_point(spec, value);
    std::vector<Matrix> anchors;
    bool inputs_failed = false;
    try {
      // All methods at a grid point are timed on the same inputs.
      anchors = sweep_inputs(spec, value);
    } catch (const std::bad_alloc&) {
      inputs_failed = true;
    }
    for (AlignMethod method : spec.methods) {
      SweepRow row;
      row.method = method;
      row.param_value = value;
      if (inputs_failed) {
        row.skipped = true;
        row.skip_reason = "allocation failure";
        result.rows.push_back(std::move(row));
        continue;
      }
      try {
        const Matrix identity = Matrix::identity(dims.l);
        // Target sampling is a one-off outside the measured region, in
        // line with the analytic cost model.
        const Matrix odc_target =
            haar_orthogonal(dims.l, splitmix64(spec.seed ^ 0x0dcULL) + static_cast<std::uint64_t>(value));
        run_method_once(method, anchors, identity, odc_target);  // warm-up
        std::vector<double> times;
        times.reserve(static_cast<std::size_t>(spec.repeats));
        for (index_t rep = 0; rep < spec.repeats; ++rep) {
          const auto t0 = clock::now();
          run_method_once(method, anchors, identity, odc_target);
          const auto t1 = clock::now();
          times.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        row.median_seconds = median(std::move(times));
      } catch (const std::bad_alloc&) {
        row.skipped = true;
        row.skip_reason = "allocation failure";
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::vector<Matrix> sweep_inputs(const SweepSpec& spec, index_t value) {
  const GridPoint dims = grid_point(spec, value);
  const std::uint64_t point_seed =
      splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(value)));
  std::vector<Matrix> anchors;
  anchors.reserve(static_cast<std::size_t>(dims.c));
  for (index_t i = 0; i < dims.c; ++i)
    anchors.push_back(Matrix::random_uniform(
        dims.a, dims.l, splitmix64(point_seed ^ static_cast<std::uint64_t>(i + 1))));
  return anchors;
}

std::string SweepResult::to_csv() const {
  std::ostringstream os;
  os << "method,free_param,value,median_s,repeats,threads,svd_backend\n";
  for (const SweepRow& row : rows) {
    os << to_string(row.method) << ',' << to_string(spec.free_param) << ',' << row.param_value
       << ',';
    if (row.skipped)
      os << "skipped:" << row.skip_reason;
    else
      os << row.median_seconds;
    os << ',' << spec.repeats << ',' << threads << ",\"" << svd_backend << "\"\n";
  }
  return os.str();
}

std::string SweepResult::metadata_json() const {
  nlohmann::json j;
  j["sweep"] = nlohmann::json::parse(spec.to_json());
  j["threads"] = threads;
  j["hardware_concurrency"] = std::thread::hardware_concurrency();
  j["svd_backend"] = svd_backend;
  j["svd_note"] =
      "baselines use exact SVD rather than randomized SVD; measured baseline "
      "times are an upper bound relative to randomized-SVD implementations";
#if defined(__VERSION__)
  j["compiler"] = __VERSION__;
#endif
  return j.dump(2);
}

namespace {

FitResult fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  if (sxx == 0.0) throw FitError("regression: all abscissae equal");

  FitResult fit;
  fit.alpha = sxy / sxx;
  fit.kappa = mean_y - fit.alpha * mean_x;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.kappa + fit.alpha * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  return fit;
}

}  // namespace

FitResult ols_loglog(const std::vector<double>& xs, const std::vector<double>& ts) {
  if (xs.size() != ts.size()) throw DimensionError("ols_loglog: length mismatch");
  if (xs.size() < 3) throw ValidationError("ols_loglog: needs at least 3 points");
  std::vector<double> lx(xs.size()), lt(ts.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0 || ts[i] <= 0.0) throw ValidationError("ols_loglog: inputs must be positive");
    lx[i] = std::log10(xs[i]);
    lt[i] = std::log10(ts[i]);
  }
  return fit_line(lx, lt);
}

FitResult ols_linear(const std::vector<double>& cs, const std::vector<double>& ts) {
  if (cs.size() != ts.size()) throw DimensionError("ols_linear: length mismatch");
  if (cs.size() < 3) throw ValidationError("ols_linear: needs at least 3 points");
  return fit_line(cs, ts);
}

}  // namespace dc
