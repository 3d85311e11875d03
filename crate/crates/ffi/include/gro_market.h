#ifndef GRO_MARKET_H
#define GRO_MARKET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GroStatus {
  GRO_STATUS_OK = 0,
  GRO_STATUS_NULL_POINTER = 1,
  GRO_STATUS_INVALID_CONFIG = 2,
  GRO_STATUS_DOMAIN = 3,
  GRO_STATUS_RUNTIME = 4,
  GRO_STATUS_IO = 5,
  GRO_STATUS_INVALID_UTF8 = 6,
  GRO_STATUS_OUT_OF_RANGE = 7,
  GRO_STATUS_PANIC = 8,
} GroStatus;

/**
 * A validated experiment configuration.
 */
typedef struct GroConfig GroConfig;

/**
 * One simulated path.
 */
typedef struct GroTrajectory GroTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`).  Returns the full message length plus one, so a
 * caller can size the buffer by calling with `len = 0`.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t gro_last_error_message(char *buf, size_t len);

/**
 * Solve one period.  `payoffs` holds `atoms × assets` values row by row,
 * `probs` one probability per atom, and `lambda_out` receives `assets`
 * proportions.
 *
 * # Safety
 * Pointers must be valid for the stated lengths; outputs must be writable.
 */
enum GroStatus gro_solve_zeta(double c,
                              double rho,
                              const double *payoffs,
                              const double *probs,
                              size_t atoms,
                              size_t assets,
                              double tol,
                              double *zeta_out,
                              bool *in_gamma_out,
                              double *lambda_out);

/**
 * `α(ln α − ln β) − ‖α − β‖²/4 − |α| + |β|` for vectors of length `n`.
 *
 * # Safety
 * `alpha` and `beta` must hold `n` values; `out` must be writable.
 */
enum GroStatus gro_gibbs_gap(const double *alpha, const double *beta, size_t n, double *out);

/**
 * Parse and validate a JSON configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GroStatus gro_config_from_json(const char *json, struct GroConfig **out);

/**
 * Load a bundled preset by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum GroStatus gro_config_preset(const char *name, struct GroConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from this library not yet freed.
 */
void gro_config_free(struct GroConfig *cfg);

/**
 * Number of investors, assets, periods and paths of a configuration.
 *
 * # Safety
 * `cfg` must be a live handle; each output must be null or writable.
 */
enum GroStatus gro_config_shape(const struct GroConfig *cfg,
                                size_t *investors,
                                size_t *assets,
                                size_t *horizon,
                                uint64_t *paths);

/**
 * Simulate path `path` of the configuration.  The same `(config, path)`
 * always yields the same trajectory.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum GroStatus gro_simulate_path(const struct GroConfig *cfg,
                                 uint64_t path,
                                 struct GroTrajectory **out);

/**
 * # Safety
 * `traj` must be null or a handle from this library not yet freed.
 */
void gro_trajectory_free(struct GroTrajectory *traj);

/**
 * Number of simulated periods.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum GroStatus gro_trajectory_horizon(const struct GroTrajectory *traj, size_t *out);

/**
 * Investor wealth `Y_t` (`t = 0` is the initial wealth) into `out[0..len]`.
 *
 * # Safety
 * `traj` must be a live handle; `out` must hold `len` writable values.
 */
enum GroStatus gro_trajectory_wealth(const struct GroTrajectory *traj,
                                     size_t t,
                                     double *out,
                                     size_t len);

/**
 * Relative wealth `r_t` into `out[0..len]`.
 *
 * # Safety
 * As for [`gro_trajectory_wealth`].
 */
enum GroStatus gro_trajectory_relative(const struct GroTrajectory *traj,
                                       size_t t,
                                       double *out,
                                       size_t len);

/**
 * Write the trajectory as CSV.
 *
 * # Safety
 * `traj` must be a live handle; `path` a NUL-terminated string.
 */
enum GroStatus gro_trajectory_write_csv(const struct GroTrajectory *traj, const char *path);

/**
 * Run one named verification suite with default thresholds.
 *
 * # Safety
 * `suite` must be a NUL-terminated string; `passed` must be writable.
 */
enum GroStatus gro_verify_suite(const char *suite, uint64_t seed, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRO_MARKET_H */
