#ifndef SPHERE_RICCI_H
#define SPHERE_RICCI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum SrStatus {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_POINTER = 1,
  SR_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Output buffer length does not match the object.
   */
  SR_STATUS_BUFFER_SIZE = 3,
  /**
   * The flow left the admissible range.
   */
  SR_STATUS_BLOWUP = 4,
  /**
   * Any other numerical failure.
   */
  SR_STATUS_NUMERICAL = 5,
  SR_STATUS_PANIC = 6,
} SrStatus;

/**
 * A conformal factor `u` on a colatitude grid, with its flow time.
 */
typedef struct SrMetric SrMetric;

/**
 * Snapshots of a flow run.
 */
typedef struct SrTrajectory SrTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sr_last_error_message(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *sr_version(void);

/**
 * Round sphere on `n` intervals (`n` even, at least 16).
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum SrStatus sr_metric_round(size_t n, struct SrMetric **out);

/**
 * `u = Σ amplitudes[k] cos(modes[k] ψ)`, normalized to area `4π`. Modes must
 * be even.
 *
 * # Safety
 * `modes` and `amplitudes` must point to `count` readable elements; `out`
 * must be valid for writing a pointer.
 */
enum SrStatus sr_metric_fourier(size_t n,
                                const uint32_t *modes,
                                const double *amplitudes,
                                size_t count,
                                struct SrMetric **out);

/**
 * The Rosenau solution at flow time `t`, sampled on `n` intervals.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum SrStatus sr_metric_rosenau(size_t n, double t, struct SrMetric **out);

/**
 * Metric from `len = n + 1` nodal samples of `u`, not normalized.
 *
 * # Safety
 * `u` must point to `len` readable doubles; `out` must be valid for writing
 * a pointer.
 */
enum SrStatus sr_metric_from_samples(const double *u, size_t len, struct SrMetric **out);

/**
 * Releases a metric; NULL is ignored.
 *
 * # Safety
 * `m` must be NULL or a handle from this library not yet freed.
 */
void sr_metric_free(struct SrMetric *m);

/**
 * Number of nodes, `n + 1`.
 *
 * # Safety
 * `m` must be a live handle; `out` valid for writing.
 */
enum SrStatus sr_metric_len(const struct SrMetric *m, size_t *out);

/**
 * # Safety
 * `m` must be a live handle; `out` valid for writing.
 */
enum SrStatus sr_metric_time(const struct SrMetric *m, double *out);

/**
 * Copies the samples of `u` into `buf`, which must have `n + 1` entries.
 *
 * # Safety
 * `m` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum SrStatus sr_metric_u(const struct SrMetric *m, double *buf, size_t len);

/**
 * Gauss curvature at the nodes.
 *
 * # Safety
 * `m` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum SrStatus sr_metric_curvature(const struct SrMetric *m, double *buf, size_t len);

/**
 * # Safety
 * `m` must be a live handle; `out` valid for writing.
 */
enum SrStatus sr_metric_total_area(const struct SrMetric *m, double *out);

/**
 * `∫ K dμ`, equal to `4π` up to rounding.
 *
 * # Safety
 * `m` must be a live handle; `out` valid for writing.
 */
enum SrStatus sr_metric_total_curvature(const struct SrMetric *m, double *out);

/**
 * Rescales `m` in place to area `4π`.
 *
 * # Safety
 * `m` must be a live handle not aliased elsewhere during the call.
 */
enum SrStatus sr_metric_normalize(struct SrMetric *m);

/**
 * Ritoré scan: positive curvature, non-increasing from the pole to the
 * equator. `first_violation` receives the first failing node, or `SIZE_MAX`.
 *
 * # Safety
 * `m` must be a live handle; the outputs valid for writing.
 */
enum SrStatus sr_metric_ritore(const struct SrMetric *m, bool *certified, size_t *first_violation);

/**
 * Profile `φ` and its first two derivatives at the area fractions `xi`.
 * `d1` and `d2` may be NULL.
 *
 * # Safety
 * `m` must be a live handle; `xi` readable and `value`, `d1`, `d2` (when not
 * NULL) writable for `count` doubles.
 */
enum SrStatus sr_metric_profile(const struct SrMetric *m,
                                const double *xi,
                                size_t count,
                                double *value,
                                double *d1,
                                double *d2);

/**
 * Integrates the normalized flow from `m0` (area `4π`) to `t_end`, with
 * snapshots at `times` (sorted, within `[0, t_end]`). `safety` in (0, 1].
 *
 * # Safety
 * `m0` must be a live handle; `times` readable for `count` doubles; `out`
 * valid for writing a pointer.
 */
enum SrStatus sr_evolve(const struct SrMetric *m0,
                        double t_end,
                        double safety,
                        const double *times,
                        size_t count,
                        struct SrTrajectory **out);

/**
 * Releases a trajectory; NULL is ignored.
 *
 * # Safety
 * `t` must be NULL or a handle from this library not yet freed.
 */
void sr_trajectory_free(struct SrTrajectory *t);

/**
 * # Safety
 * `t` must be a live handle; `out` valid for writing.
 */
enum SrStatus sr_trajectory_len(const struct SrTrajectory *t, size_t *out);

/**
 * Copy of snapshot `index` as a new metric handle.
 *
 * # Safety
 * `t` must be a live handle; `out` valid for writing a pointer.
 */
enum SrStatus sr_trajectory_snapshot(const struct SrTrajectory *t,
                                     size_t index,
                                     struct SrMetric **out);

/**
 * Rosenau offset `t0` of the profile of `m`; `+∞` for round data.
 *
 * # Safety
 * `m` must be a live handle; `out` valid for writing.
 */
enum SrStatus sr_solve_t0(const struct SrMetric *m, double *out);

/**
 * Rosenau offset of tabulated profile samples. `sup_curvature` may be NaN
 * when unknown, in which case it is estimated from the small-area samples.
 *
 * # Safety
 * `xi` and `value` readable for `count` doubles; `out` valid for writing.
 */
enum SrStatus sr_solve_t0_samples(const double *xi,
                                  const double *value,
                                  size_t count,
                                  double sup_curvature,
                                  double *out);

/**
 * Runs the comparison monitors on `t` against the Rosenau model shifted by
 * `t0`. `passed` is true when no monitor failed. When `json` is not NULL it
 * receives the full report, to be released with [`sr_string_free`].
 *
 * # Safety
 * `t` must be a live handle; `passed` valid for writing; `json` NULL or
 * valid for writing a pointer.
 */
enum SrStatus sr_compare(const struct SrTrajectory *t, double t0, bool *passed, char **json);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void sr_string_free(char *s);

/**
 * Rosenau profile `φ(ξ, t)`; `t = +∞` gives the round profile.
 */
double sr_rosenau_profile(double xi, double t);

/**
 * Curvature bound `x coth x` at `x = e^{-2(t+t0)}`.
 */
double sr_curvature_bound(double t, double t0);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHERE_RICCI_H */
