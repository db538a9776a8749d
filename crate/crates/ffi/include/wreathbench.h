#ifndef WREATHBENCH_H
#define WREATHBENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `WB_STATUS_OK` is zero.
 */
typedef enum WbStatus {
  WB_STATUS_OK = 0,
  WB_STATUS_NULL_POINTER = 1,
  WB_STATUS_INVALID_UTF8 = 2,
  WB_STATUS_INVALID_INPUT = 3,
  WB_STATUS_DIMENSION_MISMATCH = 4,
  WB_STATUS_PARSE = 5,
  WB_STATUS_CAPACITY = 6,
  WB_STATUS_CROSS_PRESENTATION = 7,
  WB_STATUS_NOT_REALIZABLE = 8,
  WB_STATUS_CODE_SEARCH_EXHAUSTED = 9,
  WB_STATUS_PANIC = 10,
} WbStatus;

/**
 * Binary linear code `C ⊆ Z₂^d`.
 */
typedef struct WbCode WbCode;

/**
 * Finite metric space.
 */
typedef struct WbMetric WbMetric;

typedef struct WbDistortion {
  double lower_bound;
  double upper_bound;
  double expansion_ratio;
  double solver_residual;
  size_t iterations;
  /**
   * Nonzero when the solver stopped before certifying the value.
   */
  uint8_t inconclusive;
} WbDistortion;

typedef struct WbBound {
  double eps_hat;
  double bound;
} WbBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next `wb_` call on the same thread.
 */
const char *wb_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wb_version(void);

/**
 * Parses a metric in the text format accepted by the command-line tool.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WbStatus wb_metric_from_text(const char *text, struct WbMetric **out);

/**
 * The Hamming cube `{0,1}^d`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum WbStatus wb_metric_hamming_cube(size_t d, struct WbMetric **out);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t wb_metric_len(const struct WbMetric *m);

/**
 * Distance between points `i` and `j`.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum WbStatus wb_metric_distance(const struct WbMetric *m, size_t i, size_t j, double *out);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void wb_metric_free(struct WbMetric *m);

/**
 * Seeded code of length `d` and dimension `dimc` containing the all-ones
 * word, with minimum distance at least `floor`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum WbStatus wb_code_make(size_t d, size_t dimc, uint64_t seed, size_t floor, struct WbCode **out);

/**
 * Minimum distance of the code, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t wb_code_min_distance(const struct WbCode *c);

/**
 * `Z₂^d / C^⊥` with the quotient Hamming metric.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum WbStatus wb_code_quotient_space(const struct WbCode *c,
                                     size_t point_budget,
                                     struct WbMetric **out);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void wb_code_free(struct WbCode *c);

/**
 * Least Euclidean distortion of `m`. `max_points` caps the solver size; 0
 * keeps the default.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum WbStatus wb_exact_c2(const struct WbMetric *m, size_t max_points, struct WbDistortion *out);

/**
 * Compression upper bound from a stage table (`eta=`, `L=`, then `diam,r`
 * rows).
 *
 * # Safety
 * `table` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WbStatus wb_compression_bound(const char *table, struct WbBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WREATHBENCH_H */
