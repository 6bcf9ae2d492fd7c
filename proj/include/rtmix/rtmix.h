/*
 * rtmix C API.
 *
 * Every object is an opaque handle created by an rtmix_*_create-style call
 * and released with the matching rtmix_*_free. Functions that can fail
 * return an rtmix_status; on failure rtmix_last_error() describes the error
 * for the calling thread until its next failing call.
 *
 * Functions that return text write it into a caller buffer: *len receives
 * the full length (without the terminating NUL); if cap is too small the
 * text is truncated and RTMIX_ERR_BUFFER is returned. Pass buf = NULL,
 * cap = 0 to query the length.
 */
#ifndef RTMIX_RTMIX_H
#define RTMIX_RTMIX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RTMIX_API __declspec(dllexport)
#else
#define RTMIX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rtmix_status {
  RTMIX_OK = 0,
  RTMIX_ERR_ARGUMENT = 1,          /* null handle, bad enum, bad option */
  RTMIX_ERR_IO = 2,                /* file cannot be opened or written */
  RTMIX_ERR_FORMAT = 3,            /* missing header or column */
  RTMIX_ERR_ROW = 4,               /* malformed data row */
  RTMIX_ERR_DOMAIN = 5,            /* value outside its legal range */
  RTMIX_ERR_INFEASIBLE_SPLIT = 6,  /* no valid fold plan */
  RTMIX_ERR_ALIGNMENT = 7,         /* mismatched names, trials or layouts */
  RTMIX_ERR_NUMERICAL = 8,         /* non-finite density or likelihood */
  RTMIX_ERR_INIT = 9,              /* sampler found no finite start */
  RTMIX_ERR_FOLD = 10,             /* a cross-validation fold failed */
  RTMIX_ERR_BUFFER = 11,           /* output buffer too small */
  RTMIX_ERR_INTERNAL = 12
} rtmix_status;

typedef enum rtmix_model {
  RTMIX_MODEL_LINEAR = 0,
  RTMIX_MODEL_MIXTURE = 1
} rtmix_model;

/* Seed streams for rtmix_derive_seed. */
typedef enum rtmix_seed_stream {
  RTMIX_STREAM_CHAIN = 1,
  RTMIX_STREAM_FOLD = 2,
  RTMIX_STREAM_FOLD_PLAN = 3,
  RTMIX_STREAM_REPLICATE = 4,
  RTMIX_STREAM_PREDICTIVE = 5,
  RTMIX_STREAM_SIMULATION = 6,
  RTMIX_STREAM_SELECTION = 7
} rtmix_seed_stream;

typedef struct rtmix_dataset rtmix_dataset;
typedef struct rtmix_folds rtmix_folds;
typedef struct rtmix_fit rtmix_fit;
typedef struct rtmix_elpd rtmix_elpd;
typedef struct rtmix_comparison rtmix_comparison;
typedef struct rtmix_recovery rtmix_recovery;
typedef struct rtmix_ppc rtmix_ppc;

typedef struct rtmix_sampler_config {
  size_t n_chains;
  size_t n_warmup;
  size_t n_samples;
  uint64_t seed;
  double target_accept;
  size_t max_leapfrog;
  double path_length;
} rtmix_sampler_config;

typedef struct rtmix_design {
  size_t n_participants;
  size_t n_items;
  uint64_t seed;
} rtmix_design;

typedef struct rtmix_linear_truth {
  double beta0, beta1, sigma_e, sigma_u, sigma_w;
} rtmix_linear_truth;

typedef struct rtmix_mixture_truth {
  double beta, delta, p_sr, p_or, sigma_e, sigma_e_prime, sigma_u, sigma_w;
} rtmix_mixture_truth;

RTMIX_API const char* rtmix_version(void);
RTMIX_API const char* rtmix_last_error(void);
RTMIX_API const char* rtmix_status_name(rtmix_status status);
RTMIX_API uint64_t rtmix_derive_seed(uint64_t master, rtmix_seed_stream stream,
                                     uint64_t index);

/* Accepts "linear" or "mixture". */
RTMIX_API rtmix_status rtmix_model_parse(const char* name, rtmix_model* out);
RTMIX_API const char* rtmix_model_name(rtmix_model model);

/* ---- data ---------------------------------------------------------------- */

RTMIX_API rtmix_status rtmix_dataset_load_csv(const char* path,
                                              rtmix_dataset** out);
RTMIX_API rtmix_status rtmix_dataset_save_csv(const rtmix_dataset* dataset,
                                              const char* path);
RTMIX_API size_t rtmix_dataset_size(const rtmix_dataset* dataset);
RTMIX_API size_t rtmix_dataset_participants(const rtmix_dataset* dataset);
RTMIX_API size_t rtmix_dataset_items(const rtmix_dataset* dataset);
RTMIX_API void rtmix_dataset_free(rtmix_dataset* dataset);

RTMIX_API rtmix_status rtmix_folds_make(const rtmix_dataset* dataset, size_t k,
                                        uint64_t seed, rtmix_folds** out);
RTMIX_API rtmix_status rtmix_folds_save_csv(const rtmix_folds* folds,
                                            const char* path);
RTMIX_API size_t rtmix_folds_k(const rtmix_folds* folds);
RTMIX_API void rtmix_folds_free(rtmix_folds* folds);

/* ---- fitting ------------------------------------------------------------- */

/* 4 chains, 1000 warmup, 1000 samples, seed 1, target 0.8, 1024 steps. */
RTMIX_API void rtmix_sampler_config_init(rtmix_sampler_config* config);

RTMIX_API rtmix_status rtmix_fit_run(const rtmix_dataset* dataset,
                                     rtmix_model model,
                                     const rtmix_sampler_config* config,
                                     rtmix_fit** out);
RTMIX_API rtmix_model rtmix_fit_model(const rtmix_fit* fit);
RTMIX_API size_t rtmix_fit_coordinates(const rtmix_fit* fit);
RTMIX_API size_t rtmix_fit_draws(const rtmix_fit* fit);
RTMIX_API const char* rtmix_fit_coordinate_name(const rtmix_fit* fit,
                                                size_t coord);
/* Draw s in [0, rtmix_fit_draws), chains concatenated; NaN when out of range. */
RTMIX_API double rtmix_fit_value(const rtmix_fit* fit, size_t draw, size_t coord);
RTMIX_API double rtmix_fit_max_rhat(const rtmix_fit* fit);
RTMIX_API size_t rtmix_fit_divergences(const rtmix_fit* fit);
RTMIX_API rtmix_status rtmix_fit_save_draws_csv(const rtmix_fit* fit,
                                                const char* path);
RTMIX_API rtmix_status rtmix_fit_save_diagnostics_json(const rtmix_fit* fit,
                                                       const char* path);
RTMIX_API rtmix_status rtmix_fit_save_names_json(const rtmix_fit* fit,
                                                 const char* path);
RTMIX_API rtmix_status rtmix_fit_save_summary_csv(const rtmix_fit* fit,
                                                  const char* path);
RTMIX_API rtmix_status rtmix_fit_summary_table(const rtmix_fit* fit, char* buf,
                                               size_t cap, size_t* len);
RTMIX_API rtmix_status rtmix_fit_warnings(const rtmix_fit* fit, char* buf,
                                          size_t cap, size_t* len);
RTMIX_API void rtmix_fit_free(rtmix_fit* fit);

/* ---- cross-validation ---------------------------------------------------- */

RTMIX_API rtmix_status rtmix_kfold_run(const rtmix_dataset* dataset,
                                       rtmix_model model,
                                       const rtmix_folds* folds,
                                       const rtmix_sampler_config* config,
                                       rtmix_elpd** out);
RTMIX_API double rtmix_elpd_total(const rtmix_elpd* elpd);
RTMIX_API double rtmix_elpd_se(const rtmix_elpd* elpd);
RTMIX_API size_t rtmix_elpd_size(const rtmix_elpd* elpd);
RTMIX_API size_t rtmix_elpd_warning_count(const rtmix_elpd* elpd);
RTMIX_API rtmix_status rtmix_elpd_save_json(const rtmix_elpd* elpd,
                                            const char* path);
RTMIX_API void rtmix_elpd_free(rtmix_elpd* elpd);

/* diff = elpd(a) - elpd(b). */
RTMIX_API rtmix_status rtmix_compare(const rtmix_elpd* a, const rtmix_elpd* b,
                                     rtmix_comparison** out);
RTMIX_API double rtmix_comparison_diff(const rtmix_comparison* cmp);
RTMIX_API double rtmix_comparison_se(const rtmix_comparison* cmp);
RTMIX_API const char* rtmix_comparison_winner(const rtmix_comparison* cmp);
RTMIX_API rtmix_status rtmix_comparison_save_json(const rtmix_comparison* cmp,
                                                  const char* path);
RTMIX_API rtmix_status rtmix_comparison_table(const rtmix_elpd* a,
                                              const rtmix_elpd* b,
                                              const rtmix_comparison* cmp,
                                              char* buf, size_t cap,
                                              size_t* len);
RTMIX_API void rtmix_comparison_free(rtmix_comparison* cmp);

/* ---- simulation ---------------------------------------------------------- */

/* 37 participants, 15 items, seed 1. */
RTMIX_API void rtmix_design_init(rtmix_design* design);
/* beta0 6.06, beta1 -0.07, sigma_e 0.52, sigma_u 0.25, sigma_w 0.20. */
RTMIX_API void rtmix_linear_truth_init(rtmix_linear_truth* truth);
/* beta 5.85, delta 0.93, p_sr 0.25, p_or 0.21, sigma_e 0.22,
   sigma_e_prime 0.64, sigma_u 0.24, sigma_w 0.09. */
RTMIX_API void rtmix_mixture_truth_init(rtmix_mixture_truth* truth);

RTMIX_API rtmix_status rtmix_simulate_linear(const rtmix_linear_truth* truth,
                                             const rtmix_design* design,
                                             rtmix_dataset** out);
RTMIX_API rtmix_status rtmix_simulate_mixture(const rtmix_mixture_truth* truth,
                                              const rtmix_design* design,
                                              rtmix_dataset** out);

RTMIX_API rtmix_status rtmix_recovery_check(const rtmix_fit* fit,
                                            const char* const* names,
                                            const double* values, size_t n,
                                            double level, rtmix_recovery** out);
RTMIX_API double rtmix_recovery_coverage(const rtmix_recovery* recovery);
RTMIX_API rtmix_status rtmix_recovery_json(const rtmix_recovery* recovery,
                                           char* buf, size_t cap, size_t* len);
RTMIX_API void rtmix_recovery_free(rtmix_recovery* recovery);

RTMIX_API rtmix_status rtmix_ppc_run(const rtmix_fit* fit,
                                     const rtmix_dataset* dataset,
                                     size_t replicates, uint64_t seed,
                                     rtmix_ppc** out);
RTMIX_API size_t rtmix_ppc_extreme_count(const rtmix_ppc* ppc);
RTMIX_API rtmix_status rtmix_ppc_save_json(const rtmix_ppc* ppc,
                                           const char* path);
RTMIX_API rtmix_status rtmix_ppc_save_csv(const rtmix_ppc* ppc,
                                          const char* path);
RTMIX_API rtmix_status rtmix_ppc_table(const rtmix_ppc* ppc, char* buf,
                                       size_t cap, size_t* len);
RTMIX_API void rtmix_ppc_free(rtmix_ppc* ppc);

#ifdef __cplusplus
}
#endif

#endif /* RTMIX_RTMIX_H */
