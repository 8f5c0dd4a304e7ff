/* C interface to the FSLL library.
 *
 * Every function returns an fsll_status; on failure fsll_last_error() holds a
 * thread-local message until the next call on the same thread. Handles are
 * opaque and must be released with the matching *_free function.
 */
#ifndef FSLL_FSLL_H
#define FSLL_FSLL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FSLL_API __declspec(dllexport)
#else
#define FSLL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fsll_status {
  FSLL_OK = 0,
  FSLL_ERR_INVALID_ARGUMENT = 1, /* null pointer, unknown enum value */
  FSLL_ERR_INDEX = 2,
  FSLL_ERR_DOMAIN = 3,
  FSLL_ERR_NUMERIC = 4,
  FSLL_ERR_CAPACITY = 5,
  FSLL_ERR_IO = 6,
  FSLL_ERR_INTERNAL = 7
} fsll_status;

typedef enum fsll_model_kind {
  FSLL_MODEL_FSLL = 0,
  FSLL_MODEL_BM_DI = 1,
  FSLL_MODEL_BM_PCD = 2,
  FSLL_MODEL_BM = 3 /* Boltzmann machine of unrecorded trainer */
} fsll_model_kind;

typedef enum fsll_gen_family { FSLL_GEN_ISING = 0, FSLL_GEN_BN2 = 1, FSLL_GEN_BN3 = 2 } fsll_gen_family;

typedef enum fsll_bench_preset { FSLL_BENCH_DESK = 0, FSLL_BENCH_FULL = 1 } fsll_bench_preset;

typedef struct fsll_dataset fsll_dataset;
typedef struct fsll_truth fsll_truth;
typedef struct fsll_model fsll_model;
typedef struct fsll_trace fsll_trace;

FSLL_API const char* fsll_last_error(void);
FSLL_API const char* fsll_status_name(fsll_status status);
FSLL_API const char* fsll_version(void);

/* ---- datasets ---- */
FSLL_API fsll_status fsll_dataset_create(const int* cards, size_t n_vars, const int* rows, size_t n_rows,
                                         fsll_dataset** out);
FSLL_API fsll_status fsll_dataset_load(const char* path, fsll_dataset** out);
FSLL_API fsll_status fsll_dataset_save(const fsll_dataset* data, const char* path);
FSLL_API fsll_status fsll_dataset_shape(const fsll_dataset* data, size_t* n_vars, size_t* n_rows);
/* Copies row r into values[0..n_vars). */
FSLL_API fsll_status fsll_dataset_row(const fsll_dataset* data, size_t r, int* values);
FSLL_API void fsll_dataset_free(fsll_dataset* data);

/* ---- true distributions ---- */
FSLL_API fsll_status fsll_truth_ising(int rows, int cols, double coupling, fsll_truth** out);
FSLL_API fsll_status fsll_truth_bayes_net(int nodes, int max_parents, uint64_t seed, fsll_truth** out);
FSLL_API fsll_status fsll_truth_table(const int* cards, size_t n_vars, const double* values, size_t n_values,
                                      fsll_truth** out);
FSLL_API fsll_status fsll_truth_load(const char* path, fsll_truth** out);
FSLL_API fsll_status fsll_truth_save(const fsll_truth* truth, const char* path);
FSLL_API fsll_status fsll_truth_sample(const fsll_truth* truth, uint64_t count, uint64_t seed, fsll_dataset** out);
/* Joint table size; values may be NULL to query only the size. */
FSLL_API fsll_status fsll_truth_density(const fsll_truth* truth, double* values, size_t capacity, size_t* size);
FSLL_API void fsll_truth_free(fsll_truth* truth);

/* ---- FSLL fitting ---- */
typedef struct fsll_fit_config {
  double epsilon;
  int max_iters;
  int prune;
  int refresh_every;
  uint64_t seed;
} fsll_fit_config;

FSLL_API void fsll_fit_config_default(fsll_fit_config* config);
FSLL_API fsll_status fsll_fit(const fsll_dataset* data, const fsll_fit_config* config, fsll_model** model,
                              fsll_trace** trace /* may be NULL */);

FSLL_API size_t fsll_trace_length(const fsll_trace* trace);
/* 1 when the fit halted on epsilon, 0 when it hit max_iters. */
FSLL_API int fsll_trace_converged(const fsll_trace* trace);
FSLL_API fsll_status fsll_trace_cost(const fsll_trace* trace, size_t i, double* cost);
FSLL_API fsll_status fsll_trace_save(const fsll_trace* trace, const char* path);
FSLL_API void fsll_trace_free(fsll_trace* trace);

/* ---- Boltzmann machine baselines ---- */
typedef struct fsll_pcd_config {
  double learning_rate;
  int chains;
  int steps;
  uint64_t seed;
  int sweeps_per_step;
} fsll_pcd_config;

FSLL_API void fsll_pcd_config_default(fsll_pcd_config* config);
FSLL_API fsll_status fsll_fit_bm_di(const fsll_dataset* data, double tolerance, int max_iters, fsll_model** model);
FSLL_API fsll_status fsll_fit_bm_pcd(const fsll_dataset* data, const fsll_pcd_config* config, fsll_model** model);

/* ---- models (either family) ---- */
FSLL_API fsll_status fsll_model_load(const char* path, fsll_model** out);
FSLL_API fsll_status fsll_model_save(const fsll_model* model, const char* path);
FSLL_API fsll_model_kind fsll_model_get_kind(const fsll_model* model);
FSLL_API size_t fsll_model_basis_count(const fsll_model* model);
FSLL_API fsll_status fsll_model_density(const fsll_model* model, double* values, size_t capacity, size_t* size);
FSLL_API fsll_status fsll_model_kl_data(const fsll_model* model, const fsll_dataset* data, double* kl);
FSLL_API fsll_status fsll_model_kl_truth(const fsll_model* model, const fsll_truth* truth, double* kl);
FSLL_API void fsll_model_free(fsll_model* model);

/* ---- command-level operations used by the CLI ---- */
typedef struct fsll_gen_request {
  fsll_gen_family family;
  int rows;
  int cols;
  double coupling;
  int nodes;
  uint64_t samples;
  uint64_t seed;
  const char* truth_path;
  const char* data_path;
} fsll_gen_request;

typedef struct fsll_run_report {
  char dataset[128];
  fsll_model_kind model;
  double kl_pd;
  double kl_pstar; /* NaN when no truth was given */
  size_t basis_count;
  double wall_ms;
  uint64_t seed;
  double mdl_cost;           /* fsll only, NaN otherwise */
  double description_length; /* fsll only, NaN otherwise */
} fsll_run_report;

typedef struct fsll_fit_request {
  fsll_model_kind kind;
  const char* data_path;
  const char* truth_path;  /* optional */
  const char* model_path;  /* optional */
  const char* trace_path;  /* optional */
  const char* report_path; /* optional */
  const char* dataset_name;/* optional */
  fsll_fit_config fsll;
  double di_tolerance;
  int di_max_iters;
  fsll_pcd_config pcd;
} fsll_fit_request;

typedef struct fsll_eval_request {
  const char* model_path;
  const char* truth_path;  /* optional */
  const char* data_path;
  const char* report_path; /* optional */
  const char* dataset_name;/* optional */
} fsll_eval_request;

typedef struct fsll_bench_request {
  fsll_bench_preset preset;
  const uint64_t* seeds;
  size_t n_seeds;
  const char* out_dir;
  int include_bm_di;
  int parallel_cells;
  int pcd_steps;
} fsll_bench_request;

FSLL_API void fsll_gen_request_default(fsll_gen_request* req);
FSLL_API void fsll_fit_request_default(fsll_fit_request* req);
FSLL_API void fsll_bench_request_default(fsll_bench_request* req);

FSLL_API fsll_status fsll_run_gen(const fsll_gen_request* req);
FSLL_API fsll_status fsll_run_fit(const fsll_fit_request* req, fsll_run_report* report);
FSLL_API fsll_status fsll_run_eval(const fsll_eval_request* req, fsll_run_report* report);
/* Writes runs.csv, table1.csv, trace_curves.csv and kl_bars.csv; rows_written may be NULL. */
FSLL_API fsll_status fsll_run_bench(const fsll_bench_request* req, size_t* rows_written);
/* Formats the report as "header\nrow\n" into buffer (NUL-terminated). */
FSLL_API fsll_status fsll_report_format(const fsll_run_report* report, char* buffer, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif /* FSLL_FSLL_H */
