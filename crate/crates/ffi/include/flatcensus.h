#ifndef FLATCENSUS_H
#define FLATCENSUS_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_INVALID_UTF8 = 2,
  FC_STATUS_PARSE = 3,
  FC_STATUS_INVALID_INPUT = 4,
  FC_STATUS_DOMAIN = 5,
  FC_STATUS_RESOURCE_LIMIT = 6,
  FC_STATUS_IO = 7,
  FC_STATUS_PANIC = 8,
} FcStatus;

/**
 * A finished census run.
 */
typedef struct FcCensus FcCensus;

/**
 * A marked square-tiled surface.
 */
typedef struct FcSurface FcSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the library;
 * valid until the next call on the same thread.
 */
const char *fc_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void fc_string_free(char *s);

/**
 * Parses a gluing table in JSON form. Unmarked tables get the default marking.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FcStatus fc_surface_from_json(const char *json, struct FcSurface **out);

/**
 * # Safety
 * `s` must be null or a handle from [`fc_surface_from_json`], not yet freed.
 */
void fc_surface_free(struct FcSurface *s);

/**
 * # Safety
 * `s` must be a live surface handle; `out` must be writable.
 */
enum FcStatus fc_surface_genus(const struct FcSurface *s, uint32_t *out);

/**
 * # Safety
 * `s` must be a live surface handle; `out` must be writable.
 */
enum FcStatus fc_surface_aut_order(const struct FcSurface *s, uint64_t *out);

/**
 * Full description as pretty JSON; free with [`fc_string_free`].
 *
 * # Safety
 * `s` must be a live surface handle; `out` must be writable.
 */
enum FcStatus fc_surface_classify_json(const struct FcSurface *s, char **out);

/**
 * Runs a pruned census of (g, n) up to `max_area` with `workers` threads.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_census_run(uint32_t g,
                            uint32_t n,
                            uint32_t max_area,
                            uint32_t workers,
                            struct FcCensus **out);

/**
 * # Safety
 * `c` must be null or a handle from [`fc_census_run`], not yet freed.
 */
void fc_census_free(struct FcCensus *c);

/**
 * Number of non-empty (area, h_type, v_type) buckets.
 *
 * # Safety
 * `c` must be a live census handle; `out` must be writable.
 */
enum FcStatus fc_census_bucket_count(const struct FcCensus *c, size_t *out);

/**
 * Sum of all buckets as `num/den`.
 *
 * # Safety
 * `c` must be a live census handle; `out` must be writable.
 */
enum FcStatus fc_census_total(const struct FcCensus *c, char **out);

/**
 * # Safety
 * `c` must be a live census handle; `out` must be writable.
 */
enum FcStatus fc_census_csv(const struct FcCensus *c, char **out);

/**
 * Closed-form constants for (g, n) as a JSON array.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_predict_json(uint32_t g, uint32_t n, char **out);

/**
 * Number of integral Dehn-Thurston points of length at most `l`, in decimal.
 *
 * # Safety
 * `pants_json` must be a NUL-terminated string; `out` must be writable.
 */
enum FcStatus fc_dt_count(const char *pants_json, uint64_t l, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLATCENSUS_H */
