#ifndef JTLAB_H
#define JTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JtStatus {
  JT_STATUS_OK = 0,
  JT_STATUS_NULL_POINTER = 1,
  JT_STATUS_INVALID_UTF8 = 2,
  JT_STATUS_INVALID_FACTOR = 3,
  JT_STATUS_SHAPE_MISMATCH = 4,
  JT_STATUS_MEMBERSHIP_VIOLATION = 5,
  JT_STATUS_FACTOR_MISMATCH = 6,
  JT_STATUS_BUFFER_TOO_SMALL = 7,
  JT_STATUS_OUT_OF_RANGE = 8,
  JT_STATUS_CONFIG = 9,
  JT_STATUS_JSON = 10,
  JT_STATUS_NUMERICAL = 11,
  JT_STATUS_CHECK_FAILED = 12,
  JT_STATUS_PANIC = 13,
} JtStatus;

/**
 * Atomic decomposition `x = Σ λ_i v_i`.
 */
typedef struct JtDecomposition JtDecomposition;

/**
 * An element of a Cartan factor.
 */
typedef struct JtElement JtElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; valid until the next call.
 */
const char *jt_last_error(void);

/**
 * Build an element from `len` interleaved `(re, im)` pairs in row-major
 * order. `factor` uses the grammar `type1:PxQ | type2:N | type3:N | spin:D`.
 *
 * # Safety
 * `factor` must be a NUL-terminated string, `data` must point to `2 * len`
 * doubles and `out` must be writable.
 */
enum JtStatus jt_element_new(const char *factor,
                             const double *data,
                             size_t len,
                             struct JtElement **out);

/**
 * Build an element from its JSON form `{"factor": ..., "data": ...}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` must be writable.
 */
enum JtStatus jt_element_from_json(const char *json, struct JtElement **out);

/**
 * # Safety
 * `x` must be null or a handle from this library not yet freed.
 */
void jt_element_free(struct JtElement *x);

/**
 * Matrix shape of the element; spin elements report `dim x 1`.
 *
 * # Safety
 * `x` must be a live handle; `rows` and `cols` must be writable.
 */
enum JtStatus jt_element_shape(const struct JtElement *x, size_t *rows, size_t *cols);

/**
 * Copy the entries as interleaved `(re, im)` pairs, row major. `cap` is the
 * number of pairs `buf` can hold.
 *
 * # Safety
 * `x` must be a live handle and `buf` must hold `2 * cap` doubles.
 */
enum JtStatus jt_element_data(const struct JtElement *x, double *buf, size_t cap);

/**
 * The triple norm.
 *
 * # Safety
 * `x` must be a live handle and `out` writable.
 */
enum JtStatus jt_element_norm(const struct JtElement *x, double *out);

/**
 * `{x, y, z}` as a new handle.
 *
 * # Safety
 * `x`, `y`, `z` must be live handles and `out` writable.
 */
enum JtStatus jt_triple_product(const struct JtElement *x,
                                const struct JtElement *y,
                                const struct JtElement *z,
                                struct JtElement **out);

/**
 * Atomic decomposition of `x`.
 *
 * # Safety
 * `x` must be a live handle and `out` writable.
 */
enum JtStatus jt_decompose(const struct JtElement *x, struct JtDecomposition **out);

/**
 * # Safety
 * `d` must be null or a handle from this library not yet freed.
 */
void jt_decomposition_free(struct JtDecomposition *d);

/**
 * Number of atoms.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum JtStatus jt_decomposition_len(const struct JtDecomposition *d, size_t *out);

/**
 * Copy the nonincreasing singular values into `buf` of capacity `cap`.
 *
 * # Safety
 * `d` must be a live handle and `buf` must hold `cap` doubles.
 */
enum JtStatus jt_decomposition_lambdas(const struct JtDecomposition *d, double *buf, size_t cap);

/**
 * The `k`-th atom (0-based) as a new element handle.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum JtStatus jt_decomposition_atom(const struct JtDecomposition *d,
                                    size_t k,
                                    struct JtElement **out);

/**
 * Run the checker suites described by a JSON trial config and return the
 * JSON report through `report` (free with `jt_string_free`). Returns
 * `CheckFailed` when the report records a failure; the report is still set.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `report` writable.
 */
enum JtStatus jt_verify(const char *config, char **report);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void jt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JTLAB_H */
