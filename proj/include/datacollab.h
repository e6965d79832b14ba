/* C interface of the data-collaboration library.
 *
 * All functions return a dc_status; DC_OK is 0. On failure the out
 * parameters are untouched and dc_last_error() carries a message for the
 * calling thread. Every object handed out through a handle must be
 * released with the matching *_free function; strings returned through
 * char** with dc_string_free.
 *
 * Matrices are dense row-major doubles. Matrix files use either the DCM1
 * binary format (magic "DCM1", rows and cols as little-endian u64, then
 * row-major little-endian doubles) or plain numeric CSV.
 */
#ifndef DATACOLLAB_H
#define DATACOLLAB_H

#include <stdint.h>

#if defined(_WIN32)
#define DC_API __declspec(dllexport)
#else
#define DC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dc_status {
  DC_OK = 0,
  DC_ERR_VALIDATION = 1,
  DC_ERR_DIMENSION = 2,
  DC_ERR_RANK = 3,
  DC_ERR_SINGULAR = 4,
  DC_ERR_NUMERICAL = 5,
  DC_ERR_IO = 6,
  DC_ERR_ARGUMENT = 7 /* null handle, bad enum value, ... */
} dc_status;

typedef enum dc_method {
  DC_METHOD_IMAKURA = 0,
  DC_METHOD_KAWAKAMI = 1,
  DC_METHOD_ODC = 2
} dc_method;

typedef struct dc_matrix dc_matrix;
typedef struct dc_scenario dc_scenario;
typedef struct dc_alignment dc_alignment;
typedef struct dc_model dc_model;

DC_API const char* dc_version(void);
DC_API const char* dc_status_name(dc_status status);
/* Message of the last failure on this thread; empty string if none. */
DC_API const char* dc_last_error(void);
DC_API void dc_string_free(char* s);

/* Caps the linear-algebra thread count; n <= 0 selects the hardware
 * default. Returns the cap actually applied. */
DC_API int dc_set_max_threads(int n);

/* ---- matrices ---------------------------------------------------- */

DC_API dc_status dc_matrix_create(int64_t rows, int64_t cols, const double* data,
                                  dc_matrix** out);
DC_API void dc_matrix_free(dc_matrix* m);
DC_API int64_t dc_matrix_rows(const dc_matrix* m);
DC_API int64_t dc_matrix_cols(const dc_matrix* m);
DC_API dc_status dc_matrix_get(const dc_matrix* m, int64_t i, int64_t j, double* out);
/* Copies all rows*cols entries, row-major. */
DC_API dc_status dc_matrix_copy_data(const dc_matrix* m, double* out);

DC_API dc_status dc_matrix_read_dcm1(const char* path, dc_matrix** out);
DC_API dc_status dc_matrix_write_dcm1(const dc_matrix* m, const char* path);
DC_API dc_status dc_matrix_read_csv(const char* path, dc_matrix** out);
DC_API dc_status dc_matrix_write_csv(const dc_matrix* m, const char* path);

DC_API dc_status dc_matrix_matmul(const dc_matrix* a, const dc_matrix* b, dc_matrix** out);
DC_API dc_status dc_matrix_sub(const dc_matrix* a, const dc_matrix* b, dc_matrix** out);
DC_API dc_status dc_matrix_frobenius(const dc_matrix* m, double* out);

/* ---- dense kernels ------------------------------------------------ */

/* sigma receives min(rows,cols) singular values, descending. */
DC_API dc_status dc_thin_svd(const dc_matrix* m, dc_matrix** u, dc_matrix** sigma,
                             dc_matrix** vt);
DC_API dc_status dc_thin_qr(const dc_matrix* m, dc_matrix** q, dc_matrix** r);
DC_API dc_status dc_pinv(const dc_matrix* m, dc_matrix** out);
DC_API dc_status dc_haar_orthogonal(int64_t dim, uint64_t seed, dc_matrix** out);

/* ---- protocol ------------------------------------------------------ */

DC_API dc_status dc_generate_anchor(int64_t anchor_rows, int64_t feature_dim, uint64_t seed,
                                    dc_matrix** out);

/* spec_json fields: users, feature_dim, latent_dim, samples_per_user,
 * anchor_rows, condition (SameSpanOrth | SameSpan | DiffSpanOrth |
 * DiffSpan), seed. */
DC_API dc_status dc_scenario_generate(const char* spec_json, dc_scenario** out);
DC_API void dc_scenario_free(dc_scenario* s);
DC_API int64_t dc_scenario_user_count(const dc_scenario* s);
DC_API dc_status dc_scenario_spec_json(const dc_scenario* s, char** out);
DC_API dc_status dc_scenario_anchor(const dc_scenario* s, dc_matrix** out);
DC_API dc_status dc_scenario_user_data(const dc_scenario* s, int64_t user, dc_matrix** out);
DC_API dc_status dc_scenario_user_basis(const dc_scenario* s, int64_t user, dc_matrix** out);
DC_API dc_status dc_scenario_user_mixing(const dc_scenario* s, int64_t user, dc_matrix** out);
/* labels has dc_matrix_rows(user data) entries. */
DC_API dc_status dc_scenario_user_labels(const dc_scenario* s, int64_t user, int64_t* labels);

/* x_tilde = X_i F_i and a_proj = A F_i, the analyst-visible bundle. */
DC_API dc_status dc_encode_user(const dc_scenario* s, int64_t user, dc_matrix** x_tilde,
                                dc_matrix** a_proj);

/* pinv(anchor) * a_j: what analyst-user collusion recovers of a secret
 * basis. */
DC_API dc_status dc_collude_reconstruct(const dc_matrix* anchor, const dc_matrix* a_j,
                                        dc_matrix** out);

/* ---- basis alignment ----------------------------------------------- */

/* anchors: per-user anchor projections, all a x l. target_r may be NULL
 * for the identity. */
DC_API dc_status dc_align_imakura(const dc_matrix* const* anchors, int64_t count,
                                  const dc_matrix* target_r, dc_alignment** out);
DC_API dc_status dc_align_kawakami(const dc_matrix* const* anchors, int64_t count,
                                   dc_alignment** out);
/* target_o may be NULL; then a Haar-random target is drawn from seed. */
DC_API dc_status dc_align_odc(const dc_matrix* const* anchors, int64_t count,
                              const dc_matrix* target_o, uint64_t seed, dc_alignment** out);

DC_API void dc_alignment_free(dc_alignment* a);
DC_API int64_t dc_alignment_count(const dc_alignment* a);
DC_API dc_status dc_alignment_method(const dc_alignment* a, dc_method* out);
DC_API dc_status dc_alignment_matrix(const dc_alignment* a, int64_t user, dc_matrix** out);
/* The R or O actually used; DC_ERR_ARGUMENT for Kawakami (target-free). */
DC_API dc_status dc_alignment_target(const dc_alignment* a, dc_matrix** out);
DC_API dc_status dc_alignment_anchor_residual(const dc_alignment* a, double* out);
/* JSON array of degeneracy notes (usually empty). */
DC_API dc_status dc_alignment_notes_json(const dc_alignment* a, char** out);

/* Concordance diagnostics from bare matrices: f[i] secret bases, g[i]
 * change-of-basis matrices; o may be NULL. Returns a JSON object with
 * basis_residual, theoretical_check and satisfied. */
DC_API dc_status dc_concordance_report(const dc_matrix* const* f, const dc_matrix* const* g,
                                       int64_t count, dc_method method, const dc_matrix* o,
                                       char** json_out);

DC_API dc_status dc_common_rotation_residual(const dc_matrix* const* left,
                                             const dc_matrix* const* right, int64_t count,
                                             double* out);

/* ---- downstream ----------------------------------------------------- */

DC_API dc_status dc_fit_nearest_centroid(const dc_matrix* x, const int64_t* labels,
                                         dc_model** out);
DC_API void dc_model_free(dc_model* m);
DC_API dc_status dc_model_centroids(const dc_model* m, dc_matrix** out);
DC_API dc_status dc_model_class_ids(const dc_model* m, int64_t* out);
DC_API dc_status dc_model_predict(const dc_model* m, const dc_matrix* y, int64_t* out);

/* ---- analytic cost models ------------------------------------------- */

/* Closed-form FLOP totals of the three alignment methods. */
DC_API dc_status dc_flops(dc_method method, int64_t a, int64_t l, int64_t c, double* out);
/* Leading-term peak memory in scalars. */
DC_API dc_status dc_peak_mem(dc_method method, int64_t a, int64_t l, int64_t c, double* out);

/* params_json fields: a, m, l, c, n_bar, N, q, gamma, R, p, beta, tau.
 * Returns totals, per-phase breakdowns, FLOPs, peak memory, break-even
 * rounds and transfer times as JSON. */
DC_API dc_status dc_cost_report(const char* params_json, char** json_out);

/* ---- timing sweeps --------------------------------------------------- */

/* sweep_json: { free_param: "l"|"a"|"c", fixed: {..}, range: {start,
 * step, stop}, repeats, methods: [..], seed }. csv_out gets the result
 * table, meta_json_out the spec echo plus host fingerprint; either may be
 * NULL if not wanted. */
DC_API dc_status dc_run_sweep(const char* sweep_json, char** csv_out, char** meta_json_out);

DC_API dc_status dc_ols_loglog(const double* xs, const double* ts, int64_t n, double* alpha,
                               double* kappa, double* r_squared);
DC_API dc_status dc_incremental_latency(const double* cs, const double* ts, int64_t n,
                                        double* slope, double* intercept, double* r_squared);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DATACOLLAB_H */
