#ifndef ROBUST_RESERVE_H
#define ROBUST_RESERVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum RrStatus {
  RR_STATUS_OK = 0,
  RR_STATUS_NULL_POINTER = 1,
  RR_STATUS_INVALID_SETTING = 2,
  RR_STATUS_INVALID_DISTRIBUTION = 3,
  RR_STATUS_INVALID_ARGUMENT = 4,
  RR_STATUS_OUT_OF_DOMAIN = 5,
  RR_STATUS_NUMERICAL = 6,
  RR_STATUS_SERIALIZATION = 7,
  RR_STATUS_INVALID_UTF8 = 8,
  RR_STATUS_PANIC = 9,
} RrStatus;

// Tie rule for an atom exactly at the reserve.
typedef enum RrTieRule {
  RR_TIE_RULE_NO_SALE_AT_RESERVE = 0,
  RR_TIE_RULE_SALE_AT_RESERVE = 1,
} RrTieRule;

// Opaque value distribution.
typedef struct RrDistribution RrDistribution;

// Opaque auction setting.
typedef struct RrSetting RrSetting;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the next call.
const char *rr_last_error(void);

// Setting with values in `[0, vmax]`.
//
// # Safety
// `out` must be null or point to writable storage for one pointer.
enum RrStatus rr_setting_bounded(uint32_t bidders,
                                 double cost,
                                 double mean,
                                 double vmax,
                                 struct RrSetting **out);

// Setting with variance at most `sigma^2`.
//
// # Safety
// `out` must be null or point to writable storage for one pointer.
enum RrStatus rr_setting_variance(uint32_t bidders,
                                  double cost,
                                  double mean,
                                  double sigma,
                                  struct RrSetting **out);

// # Safety
// `setting` must be null or a handle from `rr_setting_*` not yet freed.
void rr_setting_free(struct RrSetting *setting);

// Maxmin revenue, uniqueness of the maxmin price and the worst-case distribution.
//
// `worst_case` may be null when the distribution is not wanted.
//
// # Safety
// `setting` must be a live handle; output pointers must be writable or, for `worst_case`, null.
enum RrStatus rr_maxmin(const struct RrSetting *setting,
                        double *revenue,
                        bool *unique,
                        struct RrDistribution **worst_case);

// Full maxmin solution as a JSON document.
//
// # Safety
// `setting` must be a live handle and `out` writable; free the string with `rr_string_free`.
enum RrStatus rr_maxmin_json(const struct RrSetting *setting, char **out);

// Revenue at reserve `r` under the threat distribution for `r`.
//
// # Safety
// `setting` must be a live handle and `out` writable.
enum RrStatus rr_threat_revenue(const struct RrSetting *setting, double r, double *out);

// Parses a distribution from its JSON form.
//
// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum RrStatus rr_distribution_from_json(const char *json, struct RrDistribution **out);

// # Safety
// `dist` must be a live handle and `out` writable; free the string with `rr_string_free`.
enum RrStatus rr_distribution_to_json(const struct RrDistribution *dist, char **out);

// # Safety
// `dist` must be a live handle; `mean` and `variance` writable.
enum RrStatus rr_distribution_moments(const struct RrDistribution *dist,
                                      double *mean,
                                      double *variance);

// # Safety
// `dist` must be null or a live handle.
void rr_distribution_free(struct RrDistribution *dist);

// Expected seller revenue of `dist` at reserve `r`.
//
// # Safety
// Handles must be live and `out` writable.
enum RrStatus rr_expected_revenue(const struct RrDistribution *dist,
                                  double r,
                                  const struct RrSetting *setting,
                                  enum RrTieRule tie,
                                  double *out);

// Simulated revenue and its standard error.
//
// # Safety
// Handles must be live and the outputs writable.
enum RrStatus rr_monte_carlo_revenue(const struct RrDistribution *dist,
                                     double r,
                                     const struct RrSetting *setting,
                                     enum RrTieRule tie,
                                     size_t samples,
                                     uint64_t seed,
                                     double *estimate,
                                     double *std_error);

// Bounded-values gap coefficient.
//
// # Safety
// `out` must be writable.
enum RrStatus rr_alpha_n(uint32_t n, double *out);

// Variance-bound gap coefficient.
//
// # Safety
// `out` must be writable.
enum RrStatus rr_gamma_n(uint32_t n, double *out);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void rr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBUST_RESERVE_H */
