#include "datacollab.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "datacollab/alignment.hpp"
#include "datacollab/bench.hpp"
#include "datacollab/costmodel.hpp"
#include "datacollab/downstream.hpp"
#include "datacollab/linalg.hpp"
#include "datacollab/matrix_io.hpp"
#include "datacollab/protocol.hpp"
#include "json.hpp"

struct dc_matrix {
  dc::Matrix m;
};

struct dc_scenario {
  dc::Scenario s;
};

struct dc_alignment {
  dc::AlignmentResult r;
};

struct dc_model {
  dc::CentroidModel m;
};

namespace {

thread_local std::string g_last_error;

dc_status set_error(dc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

dc_status from_kind(dc::ErrorKind kind) {
  switch (kind) {
    case dc::ErrorKind::Validation: return DC_ERR_VALIDATION;
    case dc::ErrorKind::Dimension: return DC_ERR_DIMENSION;
    case dc::ErrorKind::Rank: return DC_ERR_RANK;
    case dc::ErrorKind::Singular: return DC_ERR_SINGULAR;
    case dc::ErrorKind::Numerical: return DC_ERR_NUMERICAL;
    case dc::ErrorKind::Io: return DC_ERR_IO;
  }
  return DC_ERR_NUMERICAL;
}

/// Runs fn, translating exceptions into status codes.
template <typename Fn>
dc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DC_OK;
  } catch (const dc::Error& e) {
    return set_error(from_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DC_ERR_NUMERICAL, "allocation failure");
  } catch (const std::exception& e) {
    return set_error(DC_ERR_NUMERICAL, e.what());
  }
}

dc_status require_arg(bool ok, const char* message) {
  return ok ? DC_OK : set_error(DC_ERR_ARGUMENT, message);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dc_matrix* wrap(dc::Matrix m) { return new dc_matrix{std::move(m)}; }

std::vector<dc::Matrix> collect(const dc_matrix* const* list, int64_t count) {
  std::vector<dc::Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    if (!list[i]) throw dc::ValidationError("null matrix handle in list");
    out.push_back(list[i]->m);
  }
  return out;
}

dc::AlignMethod to_method(dc_method m) {
  switch (m) {
    case DC_METHOD_IMAKURA: return dc::AlignMethod::Imakura;
    case DC_METHOD_KAWAKAMI: return dc::AlignMethod::Kawakami;
    case DC_METHOD_ODC: return dc::AlignMethod::ODC;
  }
  throw dc::ValidationError("unknown method enum value");
}

dc_status user_part(const dc_scenario* s, int64_t user, dc_matrix** out,
                    const dc::Matrix dc::UserPrivate::*member, const char* what) {
  if (dc_status st = require_arg(s && out, what)) return st;
  if (user < 0 || user >= static_cast<int64_t>(s->s.users.size()))
    return set_error(DC_ERR_ARGUMENT, "user index out of range");
  return guarded([&] { *out = wrap(s->s.users[static_cast<std::size_t>(user)].*member); });
}

}  // namespace

extern "C" {

const char* dc_version(void) { return "0.1.0"; }

const char* dc_status_name(dc_status status) {
  switch (status) {
    case DC_OK: return "ok";
    case DC_ERR_VALIDATION: return "validation";
    case DC_ERR_DIMENSION: return "dimension";
    case DC_ERR_RANK: return "rank";
    case DC_ERR_SINGULAR: return "singular";
    case DC_ERR_NUMERICAL: return "numerical";
    case DC_ERR_IO: return "io";
    case DC_ERR_ARGUMENT: return "argument";
  }
  return "unknown";
}

const char* dc_last_error(void) { return g_last_error.c_str(); }

void dc_string_free(char* s) { delete[] s; }

int dc_set_max_threads(int n) { return dc::apply_thread_cap(n); }

/* ---- matrices ---------------------------------------------------- */

dc_status dc_matrix_create(int64_t rows, int64_t cols, const double* data, dc_matrix** out) {
  if (dc_status s = require_arg(out && data, "dc_matrix_create: null argument")) return s;
  return guarded([&] {
    std::vector<double> values(data, data + rows * cols);
    *out = wrap(dc::Matrix(rows, cols, std::move(values)));
  });
}

void dc_matrix_free(dc_matrix* m) { delete m; }

int64_t dc_matrix_rows(const dc_matrix* m) { return m ? m->m.rows() : -1; }

int64_t dc_matrix_cols(const dc_matrix* m) { return m ? m->m.cols() : -1; }

dc_status dc_matrix_get(const dc_matrix* m, int64_t i, int64_t j, double* out) {
  if (dc_status s = require_arg(m && out, "dc_matrix_get: null argument")) return s;
  if (i < 0 || i >= m->m.rows() || j < 0 || j >= m->m.cols())
    return set_error(DC_ERR_ARGUMENT, "dc_matrix_get: index out of range");
  *out = m->m(i, j);
  return DC_OK;
}

dc_status dc_matrix_copy_data(const dc_matrix* m, double* out) {
  if (dc_status s = require_arg(m && out, "dc_matrix_copy_data: null argument")) return s;
  std::memcpy(out, m->m.data().data(), m->m.data().size() * sizeof(double));
  return DC_OK;
}

dc_status dc_matrix_read_dcm1(const char* path, dc_matrix** out) {
  if (dc_status s = require_arg(path && out, "dc_matrix_read_dcm1: null argument")) return s;
  return guarded([&] { *out = wrap(dc::read_dcm1(path)); });
}

dc_status dc_matrix_write_dcm1(const dc_matrix* m, const char* path) {
  if (dc_status s = require_arg(m && path, "dc_matrix_write_dcm1: null argument")) return s;
  return guarded([&] { dc::write_dcm1(m->m, path); });
}

dc_status dc_matrix_read_csv(const char* path, dc_matrix** out) {
  if (dc_status s = require_arg(path && out, "dc_matrix_read_csv: null argument")) return s;
  return guarded([&] { *out = wrap(dc::read_csv(path)); });
}

dc_status dc_matrix_write_csv(const dc_matrix* m, const char* path) {
  if (dc_status s = require_arg(m && path, "dc_matrix_write_csv: null argument")) return s;
  return guarded([&] { dc::write_csv(m->m, path); });
}

dc_status dc_matrix_matmul(const dc_matrix* a, const dc_matrix* b, dc_matrix** out) {
  if (dc_status s = require_arg(a && b && out, "dc_matrix_matmul: null argument")) return s;
  return guarded([&] { *out = wrap(dc::matmul(a->m, b->m)); });
}

dc_status dc_matrix_sub(const dc_matrix* a, const dc_matrix* b, dc_matrix** out) {
  if (dc_status s = require_arg(a && b && out, "dc_matrix_sub: null argument")) return s;
  return guarded([&] { *out = wrap(a->m - b->m); });
}

dc_status dc_matrix_frobenius(const dc_matrix* m, double* out) {
  if (dc_status s = require_arg(m && out, "dc_matrix_frobenius: null argument")) return s;
  *out = m->m.frobenius_norm();
  return DC_OK;
}

/* ---- dense kernels ------------------------------------------------ */

dc_status dc_thin_svd(const dc_matrix* m, dc_matrix** u, dc_matrix** sigma, dc_matrix** vt) {
  if (dc_status s = require_arg(m && u && sigma && vt, "dc_thin_svd: null argument")) return s;
  return guarded([&] {
    dc::SvdFactors f = dc::thin_svd(m->m);
    const auto k = static_cast<dc::index_t>(f.sigma.size());
    *u = wrap(std::move(f.u));
    *sigma = wrap(dc::Matrix(k, 1, std::move(f.sigma)));
    *vt = wrap(std::move(f.vt));
  });
}

dc_status dc_thin_qr(const dc_matrix* m, dc_matrix** q, dc_matrix** r) {
  if (dc_status s = require_arg(m && q && r, "dc_thin_qr: null argument")) return s;
  return guarded([&] {
    dc::QrFactors f = dc::thin_qr(m->m);
    *q = wrap(std::move(f.q_factor));
    *r = wrap(std::move(f.r_factor));
  });
}

dc_status dc_pinv(const dc_matrix* m, dc_matrix** out) {
  if (dc_status s = require_arg(m && out, "dc_pinv: null argument")) return s;
  return guarded([&] { *out = wrap(dc::pinv(m->m)); });
}

dc_status dc_haar_orthogonal(int64_t dim, uint64_t seed, dc_matrix** out) {
  if (dc_status s = require_arg(out != nullptr, "dc_haar_orthogonal: null argument")) return s;
  return guarded([&] { *out = wrap(dc::haar_orthogonal(dim, seed)); });
}

/* ---- protocol ------------------------------------------------------ */

dc_status dc_generate_anchor(int64_t anchor_rows, int64_t feature_dim, uint64_t seed,
                             dc_matrix** out) {
  if (dc_status s = require_arg(out != nullptr, "dc_generate_anchor: null argument")) return s;
  return guarded([&] { *out = wrap(dc::generate_anchor(anchor_rows, feature_dim, seed)); });
}

dc_status dc_scenario_generate(const char* spec_json, dc_scenario** out) {
  if (dc_status s = require_arg(spec_json && out, "dc_scenario_generate: null argument")) return s;
  return guarded([&] {
    *out = new dc_scenario{dc::make_scenario(dc::ScenarioSpec::from_json(spec_json))};
  });
}

void dc_scenario_free(dc_scenario* s) { delete s; }

int64_t dc_scenario_user_count(const dc_scenario* s) {
  return s ? static_cast<int64_t>(s->s.users.size()) : -1;
}

dc_status dc_scenario_spec_json(const dc_scenario* s, char** out) {
  if (dc_status st = require_arg(s && out, "dc_scenario_spec_json: null argument")) return st;
  return guarded([&] { *out = dup_string(s->s.spec.to_json()); });
}

dc_status dc_scenario_anchor(const dc_scenario* s, dc_matrix** out) {
  if (dc_status st = require_arg(s && out, "dc_scenario_anchor: null argument")) return st;
  return guarded([&] { *out = wrap(s->s.anchor); });
}

dc_status dc_scenario_user_data(const dc_scenario* s, int64_t user, dc_matrix** out) {
  return user_part(s, user, out, &dc::UserPrivate::x, "dc_scenario_user_data: null argument");
}

dc_status dc_scenario_user_basis(const dc_scenario* s, int64_t user, dc_matrix** out) {
  return user_part(s, user, out, &dc::UserPrivate::f, "dc_scenario_user_basis: null argument");
}

dc_status dc_scenario_user_mixing(const dc_scenario* s, int64_t user, dc_matrix** out) {
  return user_part(s, user, out, &dc::UserPrivate::e, "dc_scenario_user_mixing: null argument");
}

dc_status dc_scenario_user_labels(const dc_scenario* s, int64_t user, int64_t* labels) {
  if (dc_status st = require_arg(s && labels, "dc_scenario_user_labels: null argument")) return st;
  if (user < 0 || user >= static_cast<int64_t>(s->s.users.size()))
    return set_error(DC_ERR_ARGUMENT, "user index out of range");
  const auto& src = s->s.users[static_cast<std::size_t>(user)].labels;
  for (std::size_t i = 0; i < src.size(); ++i) labels[i] = src[i];
  return DC_OK;
}

dc_status dc_encode_user(const dc_scenario* s, int64_t user, dc_matrix** x_tilde,
                         dc_matrix** a_proj) {
  if (dc_status st = require_arg(s && x_tilde && a_proj, "dc_encode_user: null argument"))
    return st;
  if (user < 0 || user >= static_cast<int64_t>(s->s.users.size()))
    return set_error(DC_ERR_ARGUMENT, "user index out of range");
  return guarded([&] {
    dc::IntermediateBundle bundle =
        dc::encode_user(s->s.users[static_cast<std::size_t>(user)], s->s.anchor);
    *x_tilde = wrap(std::move(bundle.x_tilde));
    *a_proj = wrap(std::move(bundle.a_proj));
  });
}

dc_status dc_collude_reconstruct(const dc_matrix* anchor, const dc_matrix* a_j, dc_matrix** out) {
  if (dc_status s = require_arg(anchor && a_j && out, "dc_collude_reconstruct: null argument"))
    return s;
  return guarded([&] { *out = wrap(dc::collude_reconstruct(anchor->m, a_j->m)); });
}

/* ---- basis alignment ----------------------------------------------- */

dc_status dc_align_imakura(const dc_matrix* const* anchors, int64_t count,
                           const dc_matrix* target_r, dc_alignment** out) {
  if (dc_status s = require_arg(anchors && count > 0 && out, "dc_align_imakura: null argument"))
    return s;
  return guarded([&] {
    std::vector<dc::Matrix> list = collect(anchors, count);
    const dc::Matrix r =
        target_r ? target_r->m : dc::Matrix::identity(list.front().cols());
    *out = new dc_alignment{dc::align_imakura(list, r)};
  });
}

dc_status dc_align_kawakami(const dc_matrix* const* anchors, int64_t count, dc_alignment** out) {
  if (dc_status s = require_arg(anchors && count > 0 && out, "dc_align_kawakami: null argument"))
    return s;
  return guarded([&] { *out = new dc_alignment{dc::align_kawakami(collect(anchors, count))}; });
}

dc_status dc_align_odc(const dc_matrix* const* anchors, int64_t count, const dc_matrix* target_o,
                       uint64_t seed, dc_alignment** out) {
  if (dc_status s = require_arg(anchors && count > 0 && out, "dc_align_odc: null argument"))
    return s;
  return guarded([&] {
    std::vector<dc::Matrix> list = collect(anchors, count);
    *out = new dc_alignment{target_o ? dc::align_odc(list, target_o->m)
                                     : dc::align_odc(list, seed)};
  });
}

void dc_alignment_free(dc_alignment* a) { delete a; }

int64_t dc_alignment_count(const dc_alignment* a) {
  return a ? static_cast<int64_t>(a->r.g.size()) : -1;
}

dc_status dc_alignment_method(const dc_alignment* a, dc_method* out) {
  if (dc_status s = require_arg(a && out, "dc_alignment_method: null argument")) return s;
  switch (a->r.method) {
    case dc::AlignMethod::Imakura: *out = DC_METHOD_IMAKURA; break;
    case dc::AlignMethod::Kawakami: *out = DC_METHOD_KAWAKAMI; break;
    case dc::AlignMethod::ODC: *out = DC_METHOD_ODC; break;
  }
  return DC_OK;
}

dc_status dc_alignment_matrix(const dc_alignment* a, int64_t user, dc_matrix** out) {
  if (dc_status s = require_arg(a && out, "dc_alignment_matrix: null argument")) return s;
  if (user < 0 || user >= static_cast<int64_t>(a->r.g.size()))
    return set_error(DC_ERR_ARGUMENT, "user index out of range");
  return guarded([&] { *out = wrap(a->r.g[static_cast<std::size_t>(user)]); });
}

dc_status dc_alignment_target(const dc_alignment* a, dc_matrix** out) {
  if (dc_status s = require_arg(a && out, "dc_alignment_target: null argument")) return s;
  if (a->r.target.empty())
    return set_error(DC_ERR_ARGUMENT, "alignment has no target matrix (target-free method)");
  return guarded([&] { *out = wrap(a->r.target); });
}

dc_status dc_alignment_anchor_residual(const dc_alignment* a, double* out) {
  if (dc_status s = require_arg(a && out, "dc_alignment_anchor_residual: null argument")) return s;
  *out = a->r.anchor_residual;
  return DC_OK;
}

dc_status dc_alignment_notes_json(const dc_alignment* a, char** out) {
  if (dc_status s = require_arg(a && out, "dc_alignment_notes_json: null argument")) return s;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::array();
    for (const std::string& note : a->r.notes) j.push_back(note);
    *out = dup_string(j.dump());
  });
}

dc_status dc_concordance_report(const dc_matrix* const* f, const dc_matrix* const* g,
                                int64_t count, dc_method method, const dc_matrix* o,
                                char** json_out) {
  if (dc_status s =
          require_arg(f && g && count > 0 && json_out, "dc_concordance_report: null argument"))
    return s;
  return guarded([&] {
    std::optional<dc::Matrix> target;
    if (o) target = o->m;
    const dc::ConcordanceReport report =
        dc::concordance_report_parts(collect(f, count), collect(g, count), to_method(method),
                                     target);
    *json_out = dup_string(report.to_json());
  });
}

dc_status dc_common_rotation_residual(const dc_matrix* const* left, const dc_matrix* const* right,
                                      int64_t count, double* out) {
  if (dc_status s = require_arg(left && right && count > 0 && out,
                                "dc_common_rotation_residual: null argument"))
    return s;
  return guarded(
      [&] { *out = dc::common_rotation_residual(collect(left, count), collect(right, count)); });
}

/* ---- downstream ----------------------------------------------------- */

dc_status dc_fit_nearest_centroid(const dc_matrix* x, const int64_t* labels, dc_model** out) {
  if (dc_status s = require_arg(x && labels && out, "dc_fit_nearest_centroid: null argument"))
    return s;
  return guarded([&] {
    std::vector<dc::index_t> label_vec(labels, labels + x->m.rows());
    *out = new dc_model{dc::fit_nearest_centroid(x->m, label_vec)};
  });
}

void dc_model_free(dc_model* m) { delete m; }

dc_status dc_model_centroids(const dc_model* m, dc_matrix** out) {
  if (dc_status s = require_arg(m && out, "dc_model_centroids: null argument")) return s;
  return guarded([&] { *out = wrap(m->m.centroids); });
}

dc_status dc_model_class_ids(const dc_model* m, int64_t* out) {
  if (dc_status s = require_arg(m && out, "dc_model_class_ids: null argument")) return s;
  for (std::size_t i = 0; i < m->m.class_ids.size(); ++i) out[i] = m->m.class_ids[i];
  return DC_OK;
}

dc_status dc_model_predict(const dc_model* m, const dc_matrix* y, int64_t* out) {
  if (dc_status s = require_arg(m && y && out, "dc_model_predict: null argument")) return s;
  return guarded([&] {
    const std::vector<dc::index_t> pred = dc::predict(m->m, y->m);
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = pred[i];
  });
}

/* ---- analytic cost models ------------------------------------------- */

dc_status dc_flops(dc_method method, int64_t a, int64_t l, int64_t c, double* out) {
  if (dc_status s = require_arg(out != nullptr, "dc_flops: null argument")) return s;
  return guarded([&] {
    switch (to_method(method)) {
      case dc::AlignMethod::Imakura: *out = dc::flops_imakura(a, l, c).total; break;
      case dc::AlignMethod::Kawakami: *out = dc::flops_kawakami(a, l, c).total; break;
      case dc::AlignMethod::ODC: *out = dc::flops_odc(a, l, c).total; break;
    }
  });
}

dc_status dc_peak_mem(dc_method method, int64_t a, int64_t l, int64_t c, double* out) {
  if (dc_status s = require_arg(out != nullptr, "dc_peak_mem: null argument")) return s;
  return guarded([&] { *out = dc::peak_mem(to_method(method), a, l, c); });
}

dc_status dc_cost_report(const char* params_json, char** json_out) {
  if (dc_status s = require_arg(params_json && json_out, "dc_cost_report: null argument"))
    return s;
  return guarded(
      [&] { *json_out = dup_string(dc::cost_report_json(dc::CostParams::from_json(params_json))); });
}

/* ---- timing sweeps --------------------------------------------------- */

dc_status dc_run_sweep(const char* sweep_json, char** csv_out, char** meta_json_out) {
  if (dc_status s = require_arg(sweep_json != nullptr, "dc_run_sweep: null argument")) return s;
  return guarded([&] {
    const dc::SweepResult result = dc::run_sweep(dc::SweepSpec::from_json(sweep_json));
    if (csv_out) *csv_out = dup_string(result.to_csv());
    if (meta_json_out) *meta_json_out = dup_string(result.metadata_json());
  });
}

dc_status dc_ols_loglog(const double* xs, const double* ts, int64_t n, double* alpha,
                        double* kappa, double* r_squared) {
  if (dc_status s = require_arg(xs && ts && n > 0, "dc_ols_loglog: null argument")) return s;
  return guarded([&] {
    const dc::FitResult fit = dc::ols_loglog(std::vector<double>(xs, xs + n),
                                             std::vector<double>(ts, ts + n));
    if (alpha) *alpha = fit.alpha;
    if (kappa) *kappa = fit.kappa;
    if (r_squared) *r_squared = fit.r_squared;
  });
}

dc_status dc_incremental_latency(const double* cs, const double* ts, int64_t n, double* slope,
                                 double* intercept, double* r_squared) {
  if (dc_status s = require_arg(cs && ts && n > 0, "dc_incremental_latency: null argument"))
    return s;
  return guarded([&] {
    const dc::FitResult fit = dc::ols_linear(std::vector<double>(cs, cs + n),
                                             std::vector<double>(ts, ts + n));
    if (slope) *slope = fit.alpha;
    if (intercept) *intercept = fit.kappa;
    if (r_squared) *r_squared = fit.r_squared;
  });
}

} /* extern "C" */
