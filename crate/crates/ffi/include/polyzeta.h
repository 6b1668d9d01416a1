#ifndef POLYZETA_H
#define POLYZETA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Largest weight accepted by `pz_compute`; beyond it runs take hours.
 */
#define PZ_MAX_WEIGHT 16

typedef enum PzStatus {
  PZ_STATUS_OK = 0,
  PZ_STATUS_NULL_POINTER = 1,
  PZ_STATUS_INVALID_ARGUMENT = 2,
  PZ_STATUS_PARSE_ERROR = 3,
  PZ_STATUS_NUMERIC_ERROR = 4,
  PZ_STATUS_COMPUTATION_FAILED = 5,
  PZ_STATUS_BUFFER_TOO_SMALL = 6,
  PZ_STATUS_PANIC = 7,
} PzStatus;

/**
 * Engine state with its coefficients C_0..C_W.
 */
typedef struct PzExpansion PzExpansion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Runs the engine through weight `max_weight` (1..=PZ_MAX_WEIGHT) and
 * stores a new handle in `*out`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PzStatus pz_compute(uint32_t max_weight, struct PzExpansion **out);

/**
 * Rebuilds a handle from a document produced by `pz_to_json` or
 * `polyzeta compute --format json`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for a pointer write.
 */
enum PzStatus pz_from_json(const char *json, struct PzExpansion **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` must come from this library and not be used afterwards.
 */
void pz_expansion_free(struct PzExpansion *h);

/**
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum PzStatus pz_max_weight(const struct PzExpansion *h, uint32_t *out);

/**
 * The full state as JSON; free the result with `pz_string_free`.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a pointer write.
 */
enum PzStatus pz_to_json(const struct PzExpansion *h, char **out);

/**
 * C_n as text, highest lambda power first, e.g. `(-2*z(5))*L + (12*z(5))`.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a pointer write.
 */
enum PzStatus pz_coefficient_string(const struct PzExpansion *h, uint32_t n, char **out);

/**
 * Numeric lambda-coefficients of C_n: `values[d]` multiplies lambda^d.
 * `*len` is the number written; when `cap` is too small nothing is written,
 * `*len` holds the required size and the status is `BufferTooSmall`.
 *
 * # Safety
 * `h` must be a live handle, `values` valid for `cap` writes (may be null
 * when `cap` is 0), `len` valid for a write.
 */
enum PzStatus pz_coefficient_values(const struct PzExpansion *h,
                                    uint32_t n,
                                    uint32_t prec_bits,
                                    double *values,
                                    size_t cap,
                                    size_t *len);

/**
 * C_n at lambda = j_{0,m}^2.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum PzStatus pz_coefficient_at_mode(const struct PzExpansion *h,
                                     uint32_t n,
                                     uint32_t m,
                                     uint32_t prec_bits,
                                     double *out);

/**
 * lambda(P_N)/lambda_m truncated after N^-terms, and optionally the
 * eigenvalue estimate lambda_m times that ratio (`eigenvalue` may be null).
 *
 * # Safety
 * `h` must be a live handle; `ratio` valid for a write; `eigenvalue` null
 * or valid for a write.
 */
enum PzStatus pz_eval_expansion(const struct PzExpansion *h,
                                uint64_t n_sides,
                                uint32_t terms,
                                uint32_t m,
                                uint32_t prec_bits,
                                double *ratio,
                                double *eigenvalue);

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *pz_last_error(void);

/**
 * Releases a string returned by the library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pz_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pz_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYZETA_H */
