/* gsa — sequential change-point detection via moment-based LLR approximation.
 *
 * C API over the calibration/detection core. All functions return a
 * gsa_status; on failure, gsa_last_error() gives a thread-local message.
 * Opaque handles own their resources and must be released with the matching
 * *_free function. Strings and buffers returned through out-parameters are
 * released with gsa_free_string / gsa_free_buffer.
 */
#ifndef GSA_H
#define GSA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GSA_API __declspec(dllexport)
#else
#define GSA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gsa_status {
  GSA_OK = 0,
  GSA_ERR_INVALID_ARGUMENT = 1,
  GSA_ERR_DEGENERATE = 2,
  GSA_ERR_CALIBRATION = 3,
  GSA_ERR_NUMERIC = 4,
  GSA_ERR_STATE = 5,
  GSA_ERR_PARSE = 6,
  GSA_ERR_INTERNAL = 7
} gsa_status;

typedef struct gsa_model gsa_model;
typedef struct gsa_detector gsa_detector;

GSA_API const char* gsa_version(void);

/* Message for the most recent failure on this thread. */
GSA_API const char* gsa_last_error(void);

GSA_API void gsa_free_string(char* s);
GSA_API void gsa_free_buffer(double* p);

/* ---- calibration ----
 *
 * options_json (all fields optional, NULL means defaults):
 * {
 *   "basis":     {"family":"poly|log|frac|hermite","order":2,"clip_bound":10.0,
 *                 "frac_exponents":[...]},          // omit for auto-selection
 *   "auto_order": false, "order_max": 4, "order_rel_gain": 0.05,
 *   "mde":       {"kind":"mean_shift_sigma","delta":0.5} |
 *                {"kind":"per_moment","deltas":[...]} |
 *                {"kind":"swap","to":{<distribution>}},
 *   "winsor":    0.10,
 *   "rule":      "cusum|grsh|srp",
 *   "threshold": {"kind":"pe|vp|cantelli|simulation|arl0","epsilon":0.01,
 *                 "scale":1.0,"ar1_rho":0.3,"blocks":50,"block_length":500,
 *                 "arl0_target":200,"arl0_runs":200},
 *   "log1p":     false,
 *   "seed":      0,
 *   "h0":        {<distribution>}   // simulation/arl0 thresholds draw H0 data
 *                                   // from this law instead of bootstrapping
 *                                   // the calibration sample
 * }
 */
GSA_API gsa_status gsa_calibrate(const double* data, size_t len, const char* options_json,
                                 gsa_model** out_model);

GSA_API gsa_status gsa_model_from_json(const char* json, gsa_model** out_model);

/* Canonical model JSON (fixed field order, 17 significant digits). */
GSA_API gsa_status gsa_model_to_json(const gsa_model* model, char** out_json);

GSA_API void gsa_model_free(gsa_model* model);

typedef struct gsa_model_info {
  int order;
  double k0;
  double e0;
  double var0;
  double threshold;
  double j_s;
  double eta;
  double cond_f;
  int rule;            /* 0 cusum, 1 grsh, 2 srp */
  int threshold_kind;  /* 0 pe, 1 vp, 2 cantelli, 3 simulation, 4 arl0 */
  int log1p_input;
} gsa_model_info;

GSA_API gsa_status gsa_model_get_info(const gsa_model* model, gsa_model_info* out);

/* Coefficients k_1..k_s; *inout_len carries the buffer capacity in and the
 * coefficient count out. */
GSA_API gsa_status gsa_model_coeffs(const gsa_model* model, double* out, size_t* inout_len);

/* Single-observation LLR increment lambda = k0 + K . phi(x). Applies the
 * model's log1p preprocessing when recorded. */
GSA_API gsa_status gsa_model_llr(const gsa_model* model, double x, double* out_lambda);

/* ---- online detection ---- */

GSA_API gsa_status gsa_detector_new(const gsa_model* model, gsa_detector** out);

typedef struct gsa_step_result {
  uint64_t t;       /* 1-based sample count */
  double lambda;    /* LLR increment of this sample */
  double stat;      /* running statistic g / S / R */
  int alarm;        /* 1 on the first threshold crossing */
} gsa_step_result;

/* Feeds one observation. Returns GSA_ERR_STATE once the detector has alarmed;
 * use gsa_detector_reset to restart. */
GSA_API gsa_status gsa_detector_step(gsa_detector* det, double x, gsa_step_result* out);

GSA_API gsa_status gsa_detector_reset(gsa_detector* det);

GSA_API void gsa_detector_free(gsa_detector* det);

/* ---- synthetic data and experiments (JSON in / JSON out) ---- */

/* series_spec_json:
 * {"h0":{"kind":"gaussian","mu":0,"sigma":1},
 *  "change":{"kind":"mean_shift","delta":0.5},
 *  "tau":200,"n_total":1000,"seed":42}
 */
GSA_API gsa_status gsa_generate_series(const char* series_spec_json, double** out,
                                       size_t* out_len);

/* Runs a full Monte Carlo experiment manifest; returns the report JSON.
 * Deterministic given the manifest (including under parallel execution). */
GSA_API gsa_status gsa_bench_run(const char* manifest_json, char** out_report_json);

/* As gsa_bench_run, additionally returning the per-trial alarm-index CSV
 * (columns trial,config,alarm). Either out pointer may be NULL. */
GSA_API gsa_status gsa_bench_run_ex(const char* manifest_json, char** out_report_json,
                                    char** out_alarms_csv);

/* Operating-characteristic sweep: thresholds bisected to each target ARL0,
 * delays measured on post-change streams. Returns CSV. */
GSA_API gsa_status gsa_oc_curve(const char* manifest_json, const double* arl0_grid,
                                size_t grid_len, char** out_csv);

/* Canned experiment manifests. Known names: "table-4-2". */
GSA_API gsa_status gsa_repro_manifest(const char* name, char** out_manifest_json);

#ifdef __cplusplus
}
#endif

#endif /* GSA_H */
