#ifndef KNCROSS_H
#define KNCROSS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KncStatus {
  KNC_STATUS_OK = 0,
  KNC_STATUS_NULL_POINTER = 1,
  KNC_STATUS_INVALID_ARGUMENT = 2,
  KNC_STATUS_OUT_OF_RANGE = 3,
  KNC_STATUS_OVERFLOW = 4,
  KNC_STATUS_NUMERIC = 5,
  KNC_STATUS_PANIC = 6,
} KncStatus;

// Opaque counting series.
typedef struct KncSeries KncSeries;

typedef struct KncSkeletonConstants {
  double r;
  double c;
  double eta;
  double c_prime;
} KncSkeletonConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds the counting series of `family` (for example "modular") to `order`.
// `k`, `lambda` and `tau` of 0 select the family default.
//
// # Safety
// `family` must be a NUL-terminated string and `out` a valid pointer.
enum KncStatus knc_series_build(const char *family,
                                uint32_t k,
                                uint32_t lambda,
                                uint32_t tau,
                                size_t order,
                                struct KncSeries **out);

// # Safety
// `series` must come from `knc_series_build` and not be used afterwards.
void knc_series_free(struct KncSeries *series);

// # Safety
// `series` and `out` must be valid pointers.
enum KncStatus knc_series_order(const struct KncSeries *series, size_t *out);

// Coefficient `n` as an unsigned 64-bit integer; `KNC_STATUS_OVERFLOW` if
// it does not fit (use `knc_series_coeff_string` instead).
//
// # Safety
// `series` and `out` must be valid pointers.
enum KncStatus knc_series_coeff_u64(const struct KncSeries *series, size_t n, uint64_t *out);

// Coefficient `n` in decimal. Free the result with `knc_string_free`.
//
// # Safety
// `series` and `out` must be valid pointers.
enum KncStatus knc_series_coeff_string(const struct KncSeries *series, size_t n, char **out);

// The series as CSV (`family,params,n,coefficient`). Free with `knc_string_free`.
//
// # Safety
// `series` and `out` must be valid pointers.
enum KncStatus knc_series_csv(const struct KncSeries *series, char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void knc_string_free(char *s);

// Exponential growth rate 1/γ_k of modular diagrams, k in 2..=9 or larger.
//
// # Safety
// `out` must be a valid pointer.
enum KncStatus knc_modular_growth_rate(uint32_t k, double *out);

// # Safety
// `out` must be a valid pointer.
enum KncStatus knc_skeleton_constants(struct KncSkeletonConstants *out);

// Mean and variance constants of the arc count of canonical skeleton diagrams.
//
// # Safety
// `mu` and `sigma2` must be valid pointers.
enum KncStatus knc_clt_params(double *mu, double *sigma2);

// Message for the last failed call on this thread, or null. Free with
// `knc_string_free`.
char *knc_last_error(void);

// Static description of a status code.
const char *knc_status_str(enum KncStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KNCROSS_H */
