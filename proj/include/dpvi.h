/*
 * dpvi: discrete particle variational inference over finite latent spaces.
 *
 * C interface to the shared library. All functions return DPVI_OK (0) or a
 * nonzero status; on failure dpvi_last_error() describes the problem for the
 * calling thread. Handles are opaque and owned by the caller via the
 * matching *_free function.
 */
#ifndef DPVI_H
#define DPVI_H

#include <stdint.h>

#if defined(_WIN32)
#define DPVI_API __declspec(dllexport)
#else
#define DPVI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  DPVI_OK = 0,
  DPVI_ERROR = 1,
  DPVI_INVALID_ARGUMENT = 2
};

typedef struct dpvi_model dpvi_model_t;
typedef struct dpvi_result dpvi_result_t;

DPVI_API const char* dpvi_version(void);
DPVI_API const char* dpvi_last_error(void);

/* ------------------------------------------------------------------ models */

/* Two-state HMM with switch rates alpha* and emission flip rates beta*,
 * all in (0, 0.5); observations are 0/1. */
DPVI_API int dpvi_model_binary_hmm(double alpha0, double alpha1, double beta0,
                                   double beta1, const int* observations,
                                   int length, dpvi_model_t** out);

/* side x side lattice ferromagnet; theta may be NULL for a zero field. */
DPVI_API int dpvi_model_ising(int side, double beta, const double* theta,
                              dpvi_model_t** out);

/* Dirichlet process mixture; points is row-major n x dim. */
DPVI_API int dpvi_model_dpmm_nig(const double* points, int n, int dim,
                                 double crp_alpha, double tau, double a,
                                 double b, dpvi_model_t** out);
DPVI_API int dpvi_model_dpmm_niw(const double* points, int n, int dim,
                                 double crp_alpha, double tau, double nu,
                                 dpvi_model_t** out);

/* Infinite HMM over integer symbols in [0, alphabet). */
DPVI_API int dpvi_model_ihmm(const int* symbols, int length, int alphabet,
                             double alpha, double gamma, double emission_conc,
                             dpvi_model_t** out);

/* Relational model: cells is row-major num_cells x arity entity indices,
 * values the matching 0/1 observations. */
DPVI_API int dpvi_model_irm(const int* type_sizes, int num_types,
                            const int* position_types, int arity,
                            const int* cells, const int* values, int num_cells,
                            double crp_alpha, double beta, dpvi_model_t** out);

DPVI_API void dpvi_model_free(dpvi_model_t* model);

DPVI_API int dpvi_model_num_vars(const dpvi_model_t* model, int* out);

/* Log joint score of a complete assignment. */
DPVI_API int dpvi_model_log_score(const dpvi_model_t* model,
                                  const int32_t* assignment, int length,
                                  double* out);

/* Exact log partition function by enumeration; fails when the support
 * exceeds cap states. */
DPVI_API int dpvi_exact_log_z(const dpvi_model_t* model, uint64_t cap,
                              double* out);

/* --------------------------------------------------------------- inference */

/* One left-to-right filtering pass keeping the top-k unique prefixes.
 * Requires a sequential model (HMMs, mixtures). */
DPVI_API int dpvi_run_sequential(const dpvi_model_t* model, int k,
                                 dpvi_result_t** out);

/* Coordinate-ascent refinement until the bound improves by less than
 * epsilon or max_sweeps is hit. init_seed seeds the prior initialization
 * used when the model has no sequential structure. */
DPVI_API int dpvi_run_local(const dpvi_model_t* model, int k, double epsilon,
                            int max_sweeps, uint64_t init_seed,
                            dpvi_result_t** out);

/* Sequential pass followed by local refinement. */
DPVI_API int dpvi_run_smoothing(const dpvi_model_t* model, int k,
                                double epsilon, int max_sweeps,
                                dpvi_result_t** out);

/* ----------------------------------------------------------------- results */

DPVI_API int dpvi_result_bound(const dpvi_result_t* result, double* out);
DPVI_API int dpvi_result_num_particles(const dpvi_result_t* result, int* out);
DPVI_API int dpvi_result_log_weight(const dpvi_result_t* result, int index,
                                    double* out);
/* Copies particle `index` into buffer (needs num_vars capacity). */
DPVI_API int dpvi_result_assignment(const dpvi_result_t* result, int index,
                                    int32_t* buffer, int capacity);
DPVI_API int dpvi_result_trace_length(const dpvi_result_t* result, int* out);
DPVI_API int dpvi_result_trace(const dpvi_result_t* result, double* buffer,
                               int capacity);
DPVI_API void dpvi_result_free(dpvi_result_t* result);

/* ------------------------------------------------------------- experiments */

/* Runs a named experiment (hmm-ess-sweep, dpmm-synthetic, dpmm-csv,
 * ihmm-synthetic, ihmm-text, irm, ising-bound). config_path may be NULL when
 * every needed key has a default. Negative overrides mean "use the config".
 * Writes records.jsonl and summary.csv under out_dir (if non-NULL); when
 * summary_csv is non-NULL it receives the aggregate table (caller frees via
 * dpvi_string_free). */
DPVI_API int dpvi_experiment_run(const char* experiment,
                                 const char* config_path, const char* out_dir,
                                 int64_t seed, int k, int repeats,
                                 char** summary_csv);

/* Aggregates every *.jsonl under dir into a CSV (caller frees via
 * dpvi_string_free). */
DPVI_API int dpvi_summarize_dir(const char* dir, char** csv_out);

/* Re-executes every record in a records.jsonl from its own config snapshot
 * and counts records whose deterministic payload changed. */
DPVI_API int dpvi_replay_records(const char* records_path, int* mismatches);

/* Exact reference answers (enumeration, transfer matrix, forward pass) for
 * model in {hmm, ising, dpmm, irm}; returns JSON. */
DPVI_API int dpvi_oracle_report(const char* model, const char* config_path,
                                char** json_out);

DPVI_API void dpvi_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* DPVI_H */
