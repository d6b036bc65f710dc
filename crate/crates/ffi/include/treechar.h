#ifndef TREECHAR_H
#define TREECHAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_INTERNAL_ERROR = 1,
  TC_STATUS_INPUT_ERROR = 2,
  TC_STATUS_RESOURCE_ERROR = 3,
  TC_STATUS_NULL_POINTER = 4,
  TC_STATUS_PANIC = 5,
} TcStatus;

typedef enum TcMode {
  TC_MODE_EXACT = 0,
  TC_MODE_MC = 1,
  TC_MODE_AUTO = 2,
} TcMode;

typedef enum TcBracket {
  TC_BRACKET_UPPER = 0,
  TC_BRACKET_LOWER = 1,
  TC_BRACKET_EXACT_IDENTITY = 2,
  TC_BRACKET_HEURISTIC = 3,
} TcBracket;

/**
 * An opaque group handle.
 */
typedef struct TcGroup TcGroup;

/**
 * A level estimate. `value_text` is `"p/q"` for exact values and a decimal
 * otherwise; it is owned by the estimate and released by
 * `tc_estimate_clear`.
 */
typedef struct TcEstimate {
  double value;
  double radius;
  bool exact;
  enum TcBracket bracket;
  uint32_t level;
  uint64_t samples;
  uint64_t seed;
  char *value_text;
} TcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * call on the same thread.
 */
const char *tc_last_error(void);

/**
 * Library version as a static string.
 */
const char *tc_version(void);

/**
 * Loads a catalog group by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TcStatus tc_group_from_catalog(const char *name, struct TcGroup **out);

/**
 * Parses a group definition in the text format.
 *
 * # Safety
 * `name` and `text` must be NUL-terminated strings and `out` a valid
 * pointer.
 */
enum TcStatus tc_group_from_text(const char *name, const char *text, struct TcGroup **out);

/**
 * Releases a group handle. Null is ignored.
 *
 * # Safety
 * `group` must come from this library and not be used afterwards.
 */
void tc_group_free(struct TcGroup *group);

/**
 * Tree degree of the group, or 0 for a null handle.
 *
 * # Safety
 * `group` must be null or a live handle.
 */
uint32_t tc_group_degree(const struct TcGroup *group);

/**
 * Exact fixed-point measure of `word`, written to `*out` as a `"p/q"`
 * string to be released with `tc_string_free`.
 *
 * # Safety
 * `group` must be a live handle, `word` a NUL-terminated string and `out`
 * a valid pointer.
 */
enum TcStatus tc_chi1(const struct TcGroup *group, const char *word, char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tc_string_free(char *s);

/**
 * Setwise-fixed fraction of the level-`level` orbit of `set`. In Monte
 * Carlo mode `samples` and `seed` drive the sampler; otherwise they are
 * ignored unless `TC_MODE_AUTO` falls back to sampling.
 *
 * # Safety
 * `group` must be a live handle, `set` and `word` NUL-terminated strings
 * and `out` a valid pointer. Release `out` with `tc_estimate_clear`.
 */
enum TcStatus tc_psi(const struct TcGroup *group,
                     const char *set,
                     const char *word,
                     uint32_t level,
                     enum TcMode mode,
                     uint64_t samples,
                     uint64_t seed,
                     struct TcEstimate *out);

/**
 * Pointwise-trivial fraction of the level orbit. Arguments as `tc_psi`.
 *
 * # Safety
 * As `tc_psi`.
 */
enum TcStatus tc_psip(const struct TcGroup *group,
                      const char *set,
                      const char *word,
                      uint32_t level,
                      enum TcMode mode,
                      uint64_t samples,
                      uint64_t seed,
                      struct TcEstimate *out);

/**
 * Releases the text owned by an estimate and nulls it.
 *
 * # Safety
 * `est` must be null or point to an estimate filled by this library.
 */
void tc_estimate_clear(struct TcEstimate *est);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREECHAR_H */
