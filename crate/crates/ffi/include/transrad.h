#ifndef TRANSRAD_H
#define TRANSRAD_H

/* Generated by cbindgen from the transrad-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of a call. Nonzero values mirror the CLI exit codes: 2 for
// invalid inputs, 3 for data problems, 4 for numerical failures.
typedef enum TrStatus {
  // The call succeeded.
  TR_STATUS_OK = 0,
  // A required pointer argument was NULL.
  TR_STATUS_NULL_ARGUMENT = 1,
  // A parameter or configuration value was rejected.
  TR_STATUS_INVALID_INPUT = 2,
  // The dataset could not be read or parsed.
  TR_STATUS_DATA_ERROR = 3,
  // A numerical routine failed (asymmetry, indefiniteness, divergence).
  TR_STATUS_NUMERICAL_ERROR = 4,
  // An internal invariant was violated; the handle state is unchanged.
  TR_STATUS_INTERNAL = 5,
} TrStatus;

// Opaque experiment configuration handle.
typedef struct TrConfig TrConfig;

// Opaque experiment result handle.
typedef struct TrResult TrResult;

// One truncation level of the bound-comparison sweep. Optional columns use
// a presence flag; the value field is 0 when the flag is false.
typedef struct TrRow {
  // Number of retained spectral components.
  size_t t;
  // Monte-Carlo lower confidence bound.
  double mc_lower;
  // Monte-Carlo upper confidence bound.
  double mc_upper;
  // Closed-form coefficient-norm bound (see `has_generic`).
  double generic_bound;
  // Closed-form kernel-trace bound (see `has_kernel`).
  double kernel_bound;
  // Exact brute-force value (see `has_exact`; only for tiny instances).
  double exact_oracle;
  // Whether `generic_bound` is populated.
  bool has_generic;
  // Whether `kernel_bound` is populated.
  bool has_kernel;
  // Whether `exact_oracle` is populated.
  bool has_exact;
} TrRow;

// Assembled risk-bound summary of a finished experiment.
typedef struct TrRiskSummary {
  // Labeled points.
  size_t m;
  // Unlabeled points.
  size_t u;
  // Empirical margin error on the labeled side.
  double empirical_margin_error;
  // Complexity value plugged into the bound.
  double complexity;
  // Margin parameter γ.
  double gamma;
  // Confidence parameter δ.
  double delta;
  // Slack term proportional to √min(m, u).
  double slack_sqrt_min;
  // Confidence slack term.
  double slack_confidence;
  // Assembled bound on the test margin error.
  double total;
  // `total` clamped to [0, 1].
  double total_clipped;
} TrRiskSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the library version as a static NUL-terminated string.
const char *tr_version(void);

// Copies the current thread's last error message into `buffer` (always
// NUL-terminated when `capacity` > 0) and returns the message length in
// bytes, excluding the terminator. Call with a NULL buffer to query the
// required capacity.
//
// # Safety
// `buffer` must either be NULL or point to at least `capacity` writable
// bytes.
size_t tr_last_error(char *buffer, size_t capacity);

// Parses an experiment configuration file and stores a new handle in
// `out`. The handle must be released with `tr_config_free`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer; on
// success `*out` owns the handle.
enum TrStatus tr_config_load(const char *path, struct TrConfig **out);

// Releases a configuration handle. NULL is ignored.
//
// # Safety
// `config` must be NULL or a pointer returned by `tr_config_load` that has
// not been freed yet.
void tr_config_free(struct TrConfig *config);

// Runs the full experiment for `config` under `seed` and stores a new
// result handle in `out`. The handle must be released with
// `tr_result_free`.
//
// # Safety
// `config` must be a live handle from `tr_config_load` and `out` a valid
// pointer; on success `*out` owns the handle.
enum TrStatus tr_run(const struct TrConfig *config, uint64_t seed, struct TrResult **out);

// Releases a result handle. NULL is ignored.
//
// # Safety
// `result` must be NULL or a pointer returned by `tr_run` that has not
// been freed yet.
void tr_result_free(struct TrResult *result);

// Returns the number of truncation levels in the sweep, or 0 for NULL.
//
// # Safety
// `result` must be NULL or a live handle from `tr_run`.
size_t tr_result_row_count(const struct TrResult *result);

// Copies sweep row `index` into `row`.
//
// # Safety
// `result` must be a live handle from `tr_run` and `row` a valid pointer.
enum TrStatus tr_result_row(const struct TrResult *result, size_t index, struct TrRow *row);

// Copies the assembled risk-bound summary into `summary`.
//
// # Safety
// `result` must be a live handle from `tr_run` and `summary` a valid
// pointer.
enum TrStatus tr_result_risk(const struct TrResult *result, struct TrRiskSummary *summary);

// Writes the sweep as CSV to `path` (UTF-8, LF line endings, full-precision
// floats).
//
// # Safety
// `result` must be a live handle from `tr_run` and `path` a NUL-terminated
// string.
enum TrStatus tr_result_write_csv(const struct TrResult *result, const char *path);

// Writes the key = value metadata sidecar (configuration, constants, error
// report, risk bound, timing) to `path`.
//
// # Safety
// `result` must be a live handle from `tr_run` and `path` a NUL-terminated
// string.
enum TrStatus tr_result_write_metadata(const struct TrResult *result, const char *path);

// Assembles the margin risk bound from explicit numbers, treating
// `complexity` as an already-computed complexity value, and stores the
// result in `summary`.
//
// # Safety
// `summary` must be a valid pointer.
enum TrStatus tr_margin_bound(double empirical_margin_error,
                              double complexity,
                              double gamma,
                              size_t m,
                              size_t u,
                              double delta,
                              struct TrRiskSummary *summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRANSRAD_H */
