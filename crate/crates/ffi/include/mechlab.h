#ifndef MECHLAB_H
#define MECHLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible entry point.
 */
typedef enum {
  MECHLAB_STATUS_OK = 0,
  MECHLAB_STATUS_NULL_POINTER = 1,
  MECHLAB_STATUS_INVALID_ARGUMENT = 2,
  MECHLAB_STATUS_DIMENSION_MISMATCH = 3,
  MECHLAB_STATUS_PARSE = 4,
  MECHLAB_STATUS_UNSUPPORTED = 5,
  MECHLAB_STATUS_IO = 6,
  MECHLAB_STATUS_PANIC = 7,
} MechlabStatus;

/**
 * Opaque mechanism bound to a space.
 */
typedef struct MechlabMechanism MechlabMechanism;

/**
 * Sampling options for [`mechlab_check`].
 */
typedef struct {
  double box_lo;
  double box_hi;
  size_t num_profiles;
  uint64_t seed;
  double tolerance;
  /**
   * Agents per profile; 0 picks the mechanism's default.
   */
  size_t agents;
} MechlabCheckOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mechlab_last_error(void);

/**
 * Parses `spec` (e.g. `"c2:1.5"`, `"median"`) for the space of dimension
 * `m` and exponent `p`, storing a new handle in `*out`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
MechlabStatus mechlab_mechanism_new(const char *spec, size_t m, double p, MechlabMechanism **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `mech` must come from [`mechlab_mechanism_new`] and not be freed twice.
 */
void mechlab_mechanism_free(MechlabMechanism *mech);

/**
 * Dimension of the handle's space, or 0 for null.
 *
 * # Safety
 * `mech` must be a live handle or null.
 */
size_t mechlab_mechanism_dimension(const MechlabMechanism *mech);

/**
 * Evaluates the mechanism on `n_agents` row-major points of the handle's
 * dimension `m`, writing the facility's `m` coordinates to `out`.
 *
 * # Safety
 * `coords` must hold `n_agents * m` doubles and `out` must hold `m`.
 */
MechlabStatus mechlab_mechanism_evaluate(const MechlabMechanism *mech,
                                         const double *coords,
                                         size_t n_agents,
                                         double *out);

/**
 * L_p distance between two `m`-dimensional points.
 *
 * # Safety
 * `a` and `b` must hold `m` doubles; `out` must be writable.
 */
MechlabStatus mechlab_lp_distance(const double *a,
                                  const double *b,
                                  size_t m,
                                  double p,
                                  double *out);

/**
 * First-order residuals of facility `w` for agents `a`, `b` in L_p.
 *
 * # Safety
 * `a`, `b`, `w` must hold `m` doubles; `r_g` and `r_h` must be writable.
 */
MechlabStatus mechlab_lp_residuals(const double *a,
                                   const double *b,
                                   const double *w,
                                   size_t m,
                                   double p,
                                   double *r_g,
                                   double *r_h);

/**
 * Default sampling options.
 */
MechlabCheckOptions mechlab_check_options_default(void);

/**
 * Runs one property check and stores the JSON report in `*json_out`
 * (free with [`mechlab_string_free`]). `*passed` receives 1 or 0.
 *
 * # Safety
 * `mech` must be a live handle, `property` a NUL-terminated string, and
 * `passed`, `json_out` writable. `options` may be null for defaults.
 */
MechlabStatus mechlab_check(const MechlabMechanism *mech,
                            const char *property,
                            const MechlabCheckOptions *options,
                            int32_t *passed,
                            char **json_out);

/**
 * Frees a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void mechlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MECHLAB_H */
