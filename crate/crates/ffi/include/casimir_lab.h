#ifndef CASIMIR_LAB_H
#define CASIMIR_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; `CASIMIR_STATUS_OK` is zero, every error is positive and stable.
 */
typedef enum CasimirStatus {
  CASIMIR_STATUS_OK = 0,
  CASIMIR_STATUS_NULL_POINTER = 1,
  CASIMIR_STATUS_NON_TIMELIKE = 2,
  CASIMIR_STATUS_NEGATIVE_TIME_COMPONENT = 3,
  CASIMIR_STATUS_SIGMA_TOO_LARGE = 4,
  CASIMIR_STATUS_NEGATIVE_SIGMA = 5,
  CASIMIR_STATUS_BAD_DIRECTION = 6,
  CASIMIR_STATUS_NON_FINITE = 7,
  CASIMIR_STATUS_NO_CONVERGENCE = 8,
  CASIMIR_STATUS_DEGENERATE_INPUT = 9,
  CASIMIR_STATUS_NEAR_POLE = 10,
  CASIMIR_STATUS_TAIL_TOO_FAT = 11,
  CASIMIR_STATUS_INVALID_GEOMETRY = 12,
  CASIMIR_STATUS_INVALID_CONFIG = 13,
  CASIMIR_STATUS_PANIC = 14,
} CasimirStatus;

/**
 * Methods for the sphere energy shift.
 */
typedef enum CasimirSphereMethod {
  CASIMIR_SPHERE_METHOD_INTEGRAL = 0,
  CASIMIR_SPHERE_METHOD_DIRECT = 1,
  CASIMIR_SPHERE_METHOD_CLOSED_PRINTED = 2,
  CASIMIR_SPHERE_METHOD_CLOSED_DERIVED = 3,
} CasimirSphereMethod;

/**
 * Vector and scalar cutoff.
 */
typedef struct CasimirCutoff CasimirCutoff;

/**
 * Plate separation.
 */
typedef struct CasimirPlates CasimirPlates;

/**
 * Sphere radius, cutoffs and series controls.
 */
typedef struct CasimirSphere CasimirSphere;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next call into the library from the same thread.
 */
const char *casimir_last_error(void);

/**
 * Static name of a status code.
 */
const char *casimir_status_name(enum CasimirStatus status);

/**
 * Library version as a static string.
 */
const char *casimir_version(void);

/**
 * Cutoff from the vector `(t, x, y)` and scalar `sigma_scalar`.
 */
enum CasimirStatus casimir_cutoff_new(double t,
                                      double x,
                                      double y,
                                      double sigma_scalar,
                                      struct CasimirCutoff **out);

/**
 * Rest-frame cutoff with `Sigma = ratio * sigma_bar`.
 */
enum CasimirStatus casimir_cutoff_rest(double sigma_bar, double ratio, struct CasimirCutoff **out);

/**
 * New handle with the vector cutoff boosted along the unit direction `(dx, dy)`.
 */
enum CasimirStatus casimir_cutoff_boosted(const struct CasimirCutoff *cutoff,
                                          double rapidity,
                                          double dx,
                                          double dy,
                                          struct CasimirCutoff **out);

/**
 * Reads back `sigma^mu` (3 doubles), `Sigma` and `sigma_bar`; any output may be NULL.
 */
enum CasimirStatus casimir_cutoff_get(const struct CasimirCutoff *cutoff,
                                      double *vector,
                                      double *sigma_scalar,
                                      double *sigma_bar);

void casimir_cutoff_free(struct CasimirCutoff *cutoff);

enum CasimirStatus casimir_plates_new(double a, struct CasimirPlates **out);

void casimir_plates_free(struct CasimirPlates *plates);

/**
 * Exact tensor; `subtract` drops the separation-independent part.
 */
enum CasimirStatus casimir_stress_closed(const struct CasimirPlates *plates,
                                         const struct CasimirCutoff *cutoff,
                                         bool subtract,
                                         double *out);

/**
 * Tensor from the published expansion.
 */
enum CasimirStatus casimir_stress_printed(const struct CasimirPlates *plates,
                                          const struct CasimirCutoff *cutoff,
                                          bool subtract,
                                          double *out);

/**
 * Unsubtracted tensor by momentum quadrature at relative tolerance
 * `quad_tol`; `abs_error` (16 doubles) may be NULL.
 */
enum CasimirStatus casimir_stress_oracle(const struct CasimirPlates *plates,
                                         const struct CasimirCutoff *cutoff,
                                         double quad_tol,
                                         double *out,
                                         double *abs_error);

/**
 * Subtracted `T^33`, exact (`printed = false`) or from the published expansion.
 */
enum CasimirStatus casimir_pressure(const struct CasimirPlates *plates,
                                    const struct CasimirCutoff *cutoff,
                                    bool printed,
                                    double *out);

/**
 * `T^33 + d(a T^00)/da` by central difference with step `da`.
 */
enum CasimirStatus casimir_residual(const struct CasimirPlates *plates,
                                    const struct CasimirCutoff *cutoff,
                                    double da,
                                    double *out);

/**
 * Sphere with default contour angle, term cap and tolerance.
 */
enum CasimirStatus casimir_sphere_new(double a,
                                      double sigma,
                                      double sigma_scalar,
                                      struct CasimirSphere **out);

enum CasimirStatus casimir_sphere_new_full(double a,
                                           double sigma,
                                           double sigma_scalar,
                                           double phi,
                                           size_t l_max,
                                           double tol,
                                           struct CasimirSphere **out);

void casimir_sphere_free(struct CasimirSphere *sphere);

/**
 * Energy shift by the chosen method; `abs_error` may be NULL and is zero
 * for the closed forms.
 */
enum CasimirStatus casimir_sphere_delta_e(const struct CasimirSphere *sphere,
                                          enum CasimirSphereMethod method,
                                          double *out,
                                          double *abs_error);

/**
 * Cutoff-dependent sphere energy, with or without the secondary cutoff.
 */
enum CasimirStatus casimir_sphere_e_sigma(const struct CasimirSphere *sphere,
                                          bool with_secondary,
                                          double *out,
                                          double *abs_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CASIMIR_LAB_H */
