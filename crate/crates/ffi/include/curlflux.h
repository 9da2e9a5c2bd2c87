/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CURLFLUX_H
#define CURLFLUX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  CF_STATUS_INVALID_ARGUMENT = 2,
  CF_STATUS_PARSE = 3,
  CF_STATUS_NOT_INVERSE = 4,
  CF_STATUS_ENUMERATION_TOO_LARGE = 5,
  CF_STATUS_UNBOUNDED_CANCELLATION = 6,
  CF_STATUS_STATE_BUDGET_EXCEEDED = 7,
  CF_STATUS_MEMORY_BUDGET_EXCEEDED = 8,
  CF_STATUS_GROWTH_BLOW_UP = 9,
  CF_STATUS_ENGINE_UNAVAILABLE = 10,
  CF_STATUS_BUFFER_TOO_SMALL = 11,
  CF_STATUS_PANIC = 12,
} CfStatus;

typedef enum CfEngine {
  CF_ENGINE_BRUTE = 0,
  CF_ENGINE_DP = 1,
  CF_ENGINE_AUTO = 2,
} CfEngine;

typedef enum CfCount {
  CF_COUNT_CURL = 0,
  CF_COUNT_FLUX = 1,
  CF_COUNT_BALL = 2,
} CfCount;

/**
 * A parsed map file: an endomorphism and, optionally, its claimed inverse.
 */
typedef struct CfMap CfMap;

/**
 * Exact counts for every radius `0..=n`.
 */
typedef struct CfSeries CfSeries;

/**
 * Ratios and n-th roots at one radius.
 */
typedef struct CfPoint {
  size_t n;
  double curl_ratio;
  double curl_root;
  double flux_ratio;
  double flux_root;
} CfPoint;

/**
 * Monte Carlo curl ratio with a 95% normal-approximation half width.
 */
typedef struct CfEstimate {
  size_t n;
  uint64_t samples;
  uint64_t hits;
  double point;
  double ci95;
} CfEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cf_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *cf_last_error_message(void);

/**
 * Parse map-file text into a new handle.
 */
enum CfStatus cf_map_parse(const char *text, struct CfMap **out);

void cf_map_free(struct CfMap *map);

/**
 * Rank of the free group, or 0 for a null handle.
 */
size_t cf_map_rank(const struct CfMap *map);

bool cf_map_has_inverse(const struct CfMap *map);

/**
 * `CF_STATUS_OK` when the inverse section composes to the identity both
 * ways; `CF_STATUS_INVALID_ARGUMENT` when there is no inverse section.
 */
enum CfStatus cf_map_verify_inverse(const struct CfMap *map);

/**
 * Images as `name: word` lines.
 */
enum CfStatus cf_map_format(const struct CfMap *map, char *buf, size_t cap, size_t *needed);

/**
 * One-line classification: permutation, inner, simple, power map or general.
 */
enum CfStatus cf_map_classify(const struct CfMap *map, char *buf, size_t cap, size_t *needed);

/**
 * Exact curl/flux counts for radii `0..=n`.
 */
enum CfStatus cf_series_compute(const struct CfMap *map,
                                size_t n,
                                enum CfEngine engine,
                                struct CfSeries **out);

void cf_series_free(struct CfSeries *series);

/**
 * Number of points, i.e. `n + 1`; 0 for a null handle.
 */
size_t cf_series_len(const struct CfSeries *series);

enum CfStatus cf_series_point(const struct CfSeries *series, size_t n, struct CfPoint *out);

/**
 * Exact count at radius `n` as decimal text.
 */
enum CfStatus cf_series_count(const struct CfSeries *series,
                              size_t n,
                              enum CfCount which,
                              char *buf,
                              size_t cap,
                              size_t *needed);

/**
 * Seeded Monte Carlo estimate of the curl ratio at radius `n`.
 */
enum CfStatus cf_estimate_curl_ratio(const struct CfMap *map,
                                     size_t n,
                                     uint64_t samples,
                                     uint64_t seed,
                                     struct CfEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURLFLUX_H */
