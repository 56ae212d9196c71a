#ifndef CHIRALFLOW_H
#define CHIRALFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * The four N=2 currents.
 */
typedef enum CfCurrent {
  CF_CURRENT_L = 0,
  CF_CURRENT_J = 1,
  CF_CURRENT_Q = 2,
  CF_CURRENT_G = 3,
} CfCurrent;

/**
 * Result codes. `CF_STATUS_OK` is zero.
 */
typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  CF_STATUS_INVALID_UTF8 = 2,
  CF_STATUS_PARSE = 3,
  CF_STATUS_INDEX_OUT_OF_RANGE = 4,
  CF_STATUS_NOT_CREATION = 5,
  CF_STATUS_INVALID_ARGUMENT = 6,
  CF_STATUS_PRECONDITION = 7,
  CF_STATUS_CLOSURE = 8,
  /**
   * A check ran and reported FAIL; the report is still written.
   */
  CF_STATUS_CHECK_FAILED = 9,
  CF_STATUS_PANIC = 10,
} CfStatus;

/**
 * Opaque N=2 current set at a fixed rank.
 */
typedef struct CfCurrents CfCurrents;

/**
 * Opaque finite linear combination of Fock monomials.
 */
typedef struct CfState CfState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The caller
 * owns the returned string.
 */
char *cf_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cf_string_free(char *s);

/**
 * Parses a state such as `"1 b[1,-1] c[1,-1] |0>"`. With `rank > 0` the
 * mode indices are checked against it.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum CfStatus cf_state_parse(const char *text, uint32_t rank, struct CfState **out);

/**
 * Canonical multi-line text form.
 *
 * # Safety
 * `s` must be a live state handle; `out` must be writable.
 */
enum CfStatus cf_state_format(const struct CfState *s, char **out);

/**
 * Exact equality of two states.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum CfStatus cf_state_equal(const struct CfState *a, const struct CfState *b, bool *out);

/**
 * # Safety
 * `s` must be NULL or a handle not yet freed.
 */
void cf_state_free(struct CfState *s);

/**
 * `a_(n) t`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CfStatus cf_field_coeff(const struct CfState *a,
                             int64_t n,
                             const struct CfState *t,
                             struct CfState **out);

/**
 * Normally ordered product `:ab: = a_(-1) b`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CfStatus cf_nop(const struct CfState *a, const struct CfState *b, struct CfState **out);

/**
 * Builds the N=2 currents at `rank` with the frozen sign convention.
 *
 * # Safety
 * `out` must be writable.
 */
enum CfStatus cf_currents_new(uint32_t rank, struct CfCurrents **out);

/**
 * # Safety
 * `c` must be NULL or a handle not yet freed.
 */
void cf_currents_free(struct CfCurrents *c);

/**
 * Copies one current out as a state.
 *
 * # Safety
 * `c` must be live; `out` must be writable.
 */
enum CfStatus cf_currents_get(const struct CfCurrents *c,
                              enum CfCurrent which,
                              struct CfState **out);

/**
 * The vacuum images `Omega+` (`minus == false`) or `Omega-`.
 *
 * # Safety
 * `c` must be live; `out` must be writable.
 */
enum CfStatus cf_currents_omega(const struct CfCurrents *c, bool minus, struct CfState **out);

/**
 * Spectral flow `sigma` applied to a state.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CfStatus cf_sigma_apply(const struct CfCurrents *c,
                             const struct CfState *s,
                             struct CfState **out);

/**
 * Spectral flow `tau` applied to a state.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CfStatus cf_tau_apply(const struct CfCurrents *c,
                           const struct CfState *s,
                           struct CfState **out);

/**
 * Runs a named check (`"verify.n2"`, `"flow.inverse"`, ...) and writes its
 * JSON report. `hmax` is an exact rational such as `"3/2"`; `sector` is
 * `"fermionic"`, `"full"` or `"full:<g>"`; either may be NULL for the
 * default. Returns `CF_STATUS_CHECK_FAILED` when the report says FAIL.
 *
 * # Safety
 * String arguments must be NULL or NUL-terminated; `out_json` writable.
 */
enum CfStatus cf_check(const char *name,
                       uint32_t rank,
                       const char *hmax,
                       int64_t kmax,
                       int64_t mode_range,
                       const char *sector,
                       int64_t n,
                       char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CHIRALFLOW_H */
