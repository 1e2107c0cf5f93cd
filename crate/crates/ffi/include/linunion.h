#ifndef LINUNION_H
#define LINUNION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LuKind {
  LU_KIND_DISCS = 0,
  LU_KIND_CURVES = 1,
} LuKind;

typedef enum LuStatus {
  LU_STATUS_OK = 0,
  LU_STATUS_NULL_POINTER = 1,
  LU_STATUS_INVALID_UTF8 = 2,
  LU_STATUS_PARAMETER = 3,
  LU_STATUS_FORMAT = 4,
  LU_STATUS_VALIDATION = 5,
  LU_STATUS_KIND = 6,
  LU_STATUS_TANGENCY = 7,
  LU_STATUS_COINCIDENT = 8,
  LU_STATUS_GENERATION = 9,
  LU_STATUS_IO = 10,
  LU_STATUS_BUDGET_EXCEEDED = 11,
  LU_STATUS_DEGENERACY = 12,
  LU_STATUS_CERTIFICATE_FAILURE = 13,
  LU_STATUS_BUFFER_TOO_SMALL = 14,
  LU_STATUS_PANIC = 15,
} LuStatus;

/**
 * Opaque family handle.
 */
typedef struct LuFamily LuFamily;

/**
 * Summary of the charging certificate at one k.
 */
typedef struct LuCertificate {
  size_t k;
  size_t n;
  size_t qualifying_count;
  /**
   * `2 (k - 1) n`.
   */
  size_t bound;
  /**
   * `k - 1`.
   */
  size_t per_color_limit;
  size_t max_red;
  size_t max_blue;
  size_t ordering_violations;
  /**
   * 1 when every curve stays within the per-color limit and no charge
   * contradicts the curve ordering.
   */
  uint8_t pass;
} LuCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *lu_last_error(void);

/**
 * Parses a family from JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum LuStatus lu_family_from_json(const char *json, struct LuFamily **out);

/**
 * Loads a family file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum LuStatus lu_family_load(const char *path, struct LuFamily **out);

/**
 * Random discs in `[0, 10]^2` with radii in `[0.5, 2]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LuStatus lu_generate_random_discs(size_t n, uint64_t seed, struct LuFamily **out);

/**
 * Discs that all contain `(ox, oy)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LuStatus lu_generate_common_point_discs(size_t n,
                                             uint64_t seed,
                                             double ox,
                                             double oy,
                                             struct LuFamily **out);

/**
 * `k - 1` horizontal lines below `n - k + 1` unit parabolas.
 *
 * # Safety
 * `out` must be writable.
 */
enum LuStatus lu_generate_lines_parabolas(size_t n, size_t k, struct LuFamily **out);

/**
 * Random curves `y = a x^2 + b x + c`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LuStatus lu_generate_random_curves(size_t n, uint64_t seed, struct LuFamily **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `f` must come from this library and not be used afterwards.
 */
void lu_family_free(struct LuFamily *f);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_family_len(const struct LuFamily *f, size_t *out);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_family_kind(const struct LuFamily *f, enum LuKind *out);

/**
 * Family file JSON. Free with [`lu_string_free`].
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_family_to_json(const struct LuFamily *f, char **out);

/**
 * Number of depth-2 crossings (discs only).
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_union_complexity(const struct LuFamily *f, size_t *out);

/**
 * Clique number of the intersection graph (discs only).
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_clique_number(const struct LuFamily *f, size_t *out);

/**
 * Writes `g(F, k)` into `buf[k]` for `k = 0..len`, where entries 0 and 1 are
 * zero. `*len` always receives the required length; if `cap` is smaller the
 * buffer is left untouched and `BufferTooSmall` is returned. `buf` may be NULL
 * when `cap` is 0.
 *
 * # Safety
 * `f` must be a live handle; `buf` must hold `cap` entries; `len` must be writable.
 */
enum LuStatus lu_depth_profile(const struct LuFamily *f, size_t *buf, size_t cap, size_t *len);

/**
 * Charging certificate for curves at `k` (`2 <= k <= n`). A failing
 * certificate is reported through `out->pass`, not the status.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_charge_certificate(const struct LuFamily *f, size_t k, struct LuCertificate *out);

/**
 * Analysis summary as JSON: graph statistics and edge/coloring verdicts for
 * discs with union-complexity constant `c`, certificates for every k for
 * curves. Free with [`lu_string_free`].
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_analyze_json(const struct LuFamily *f, double c, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void lu_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINUNION_H */
