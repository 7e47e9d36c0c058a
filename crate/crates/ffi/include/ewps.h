#ifndef EWPS_H
#define EWPS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum EwpsStatus {
  EWPS_STATUS_OK = 0,
  EWPS_STATUS_NULL_POINTER = 1,
  EWPS_STATUS_INVALID_UTF8 = 2,
  EWPS_STATUS_DOMAIN = 3,
  EWPS_STATUS_NON_EXISTENCE = 4,
  EWPS_STATUS_DIVERGENCE = 5,
  EWPS_STATUS_TRUNCATION_CAP = 6,
  EWPS_STATUS_QUADRATURE = 7,
  EWPS_STATUS_BRACKET = 8,
  EWPS_STATUS_CONVERGENCE = 9,
  EWPS_STATUS_INSUFFICIENT_DATA = 10,
  EWPS_STATUS_PARSE = 11,
  EWPS_STATUS_IO = 12,
  EWPS_STATUS_OUT_OF_RANGE = 13,
  EWPS_STATUS_PANIC = 14,
} EwpsStatus;

// A sequence of observations.
typedef struct EwpsDatasetHandle EwpsDatasetHandle;

// The result of a maximum-likelihood fit.
typedef struct EwpsFitHandle EwpsFitHandle;

// A distribution with bound parameters.
typedef struct EwpsModelHandle EwpsModelHandle;

// Summary statistics of a fit. `aicc` is NaN when undefined.
typedef struct EwpsFitSummary {
  double loglik;
  double aic;
  double bic;
  double aicc;
  double caic;
  double ks;
  // Number of free parameters.
  size_t p;
  size_t n;
  size_t iterations;
  bool converged;
  // Number of entries available through `ewps_fit_estimate`.
  size_t estimate_count;
  size_t boundary_flag_count;
} EwpsFitSummary;

// Message for the last error on this thread, or null if none occurred.
// The pointer stays valid until the next failing call on the same thread.
const char *ewps_last_error_message(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void ewps_string_free(char *s);

// Builds a model from family names, `θ`, `α` and the generator parameters.
// A modified Weibull accepts `λ < 0`. `alpha` is ignored by generators that
// fix it to 1.
//
// # Safety
// Strings must be nul-terminated; `xi` must point to `xi_len` values.
enum EwpsStatus ewps_model_new(const char *mixer,
                               const char *generator,
                               double theta,
                               double alpha,
                               const double *xi,
                               size_t xi_len,
                               struct EwpsModelHandle **out);

// # Safety
// `model` must come from this library and not have been freed.
void ewps_model_free(struct EwpsModelHandle *model);

// # Safety
// `model` must be a live handle and `out` writable.
enum EwpsStatus ewps_model_pdf(const struct EwpsModelHandle *model, double x, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
enum EwpsStatus ewps_model_cdf(const struct EwpsModelHandle *model, double x, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
enum EwpsStatus ewps_model_survival(const struct EwpsModelHandle *model, double x, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
enum EwpsStatus ewps_model_hazard(const struct EwpsModelHandle *model, double x, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
enum EwpsStatus ewps_model_quantile(const struct EwpsModelHandle *model, double p, double *out);

// `E[Xʳ]`.
//
// # Safety
// `model` must be a live handle and `out` writable.
enum EwpsStatus ewps_model_raw_moment(const struct EwpsModelHandle *model, uint32_t r, double *out);

// Shannon entropy by quadrature.
//
// # Safety
// `model` must be a live handle and `out` writable.
enum EwpsStatus ewps_model_entropy(const struct EwpsModelHandle *model, double *out);

// Writes `n` draws, deterministic in `seed`, into `out`.
//
// # Safety
// `model` must be a live handle and `out` must have room for `n` values.
enum EwpsStatus ewps_model_sample(const struct EwpsModelHandle *model,
                                  size_t n,
                                  uint64_t seed,
                                  double *out);

// # Safety
// `values` must point to `len` finite values.
enum EwpsStatus ewps_dataset_new(const double *values, size_t len, struct EwpsDatasetHandle **out);

// The embedded phosphorus-concentration dataset (128 values).
//
// # Safety
// `out` must be writable.
enum EwpsStatus ewps_dataset_phosphorus(struct EwpsDatasetHandle **out);

// # Safety
// `data` must come from this library and not have been freed.
void ewps_dataset_free(struct EwpsDatasetHandle *data);

// Number of observations, or 0 for a null handle.
//
// # Safety
// `data` must be null or a live handle.
size_t ewps_dataset_len(const struct EwpsDatasetHandle *data);

// # Safety
// Handles must be live and `out` writable.
enum EwpsStatus ewps_log_likelihood(const struct EwpsModelHandle *model,
                                    const struct EwpsDatasetHandle *data,
                                    double *out);

// Fits `mixer × generator` to `data`. `method` may be null for the default
// (`em_then_direct`); `multistart` of 0 selects the default of 8.
//
// # Safety
// Strings must be nul-terminated, `data` live and `out` writable.
enum EwpsStatus ewps_fit(const char *mixer,
                         const char *generator,
                         const struct EwpsDatasetHandle *data,
                         const char *method,
                         size_t multistart,
                         uint64_t seed,
                         struct EwpsFitHandle **out);

// # Safety
// `fit` must come from this library and not have been freed.
void ewps_fit_free(struct EwpsFitHandle *fit);

// # Safety
// `fit` must be live and `out` writable.
enum EwpsStatus ewps_fit_summary(const struct EwpsFitHandle *fit, struct EwpsFitSummary *out);

// Estimate `index` in the order θ, α, ξ…: its value and standard error (NaN
// when absent). `fixed` is set for parameters held fixed during fitting.
//
// # Safety
// `fit` must be live; out pointers must be writable.
enum EwpsStatus ewps_fit_estimate(const struct EwpsFitHandle *fit,
                                  size_t index,
                                  double *value,
                                  double *std_error,
                                  bool *fixed);

// The fitted distribution as a new model handle, to be freed by the caller.
//
// # Safety
// `fit` must be live and `out` writable.
enum EwpsStatus ewps_fit_model(const struct EwpsFitHandle *fit, struct EwpsModelHandle **out);

// The full report as JSON; free the string with `ewps_string_free`.
//
// # Safety
// `fit` must be live and `out` writable.
enum EwpsStatus ewps_fit_report_json(const struct EwpsFitHandle *fit, char **out);

#endif  /* EWPS_H */
