#ifndef BPWA_H
#define BPWA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BpwaStatus {
  BPWA_STATUS_OK = 0,
  BPWA_STATUS_NULL_POINTER = 1,
  BPWA_STATUS_INVALID_INPUT = 2,
  BPWA_STATUS_NUMERICAL = 3,
  BPWA_STATUS_BUFFER_TOO_SMALL = 4,
  BPWA_STATUS_IO = 5,
  BPWA_STATUS_PANIC = 6,
} BpwaStatus;

/**
 * Motion codes returned by `bpwa_simulate`.
 */
typedef enum BpwaMotion {
  BPWA_MOTION_P1_INTRA = 0,
  BPWA_MOTION_P1_INTER_SYMMETRIC = 1,
  BPWA_MOTION_P1_INTER_ASYMMETRIC = 2,
  BPWA_MOTION_SUBHARMONIC = 3,
  BPWA_MOTION_CHAOTIC = 4,
  BPWA_MOTION_DIVERGED = 5,
} BpwaMotion;

/**
 * Opaque model: parameters plus simulation settings.
 */
typedef struct BpwaModel BpwaModel;

typedef struct BpwaSteadyState {
  double a0;
  double psi0;
  /**
   * 0 resonant intra-well, 1 non-resonant intra-well, 2 inter-well.
   */
  int32_t branch;
  int32_t stable;
} BpwaSteadyState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message, NUL terminated and truncated to `len`.
 * Returns the full message length without the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
uintptr_t bpwa_last_error(char *buf, uintptr_t len);

/**
 * Static version string.
 */
const char *bpwa_version(void);

/**
 * Model with reference parameters.
 *
 * # Safety
 * `out_model` must be null or writable.
 */
enum BpwaStatus bpwa_model_new(struct BpwaModel **out_model);

/**
 * Model from `key=value` configuration text.
 *
 * # Safety
 * `text` must be null or a NUL-terminated string; `out_model` null or writable.
 */
enum BpwaStatus bpwa_model_from_config(const char *text, struct BpwaModel **out_model);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `m` must come from `bpwa_model_new` or `bpwa_model_from_config` and not
 * be used afterwards.
 */
void bpwa_model_free(struct BpwaModel *m);

/**
 * Nondimensional wave forcing amplitude for `A/R` at `omega`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BpwaStatus bpwa_g_wave(const struct BpwaModel *m,
                            double amplitude_ratio,
                            double omega,
                            double *out_g);

/**
 * Radiation kernel at `t >= 0`.
 *
 * # Safety
 * `out_h` must be null or writable.
 */
enum BpwaStatus bpwa_kernel_impulse(double t, double *out_h);

/**
 * Multiple-scales steady states at one point. Writes up to `cap` states and
 * the total count to `out_len`; returns `BUFFER_TOO_SMALL` if `cap` is short.
 *
 * # Safety
 * `buf` must hold `cap` elements (or be null with `cap == 0`).
 */
enum BpwaStatus bpwa_steady_states(const struct BpwaModel *m,
                                   double amplitude_ratio,
                                   double omega,
                                   struct BpwaSteadyState *buf,
                                   uintptr_t cap,
                                   uintptr_t *out_len);

/**
 * Period-doubling residual of the intra-well orbit of amplitude `a0`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BpwaStatus bpwa_pd_residual(const struct BpwaModel *m, double a0, double omega, double *out_r);

/**
 * Simulates from rest with the model's settings, returning the motion code
 * and mean power. A diverged run reports `DIVERGED` and a NaN power.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BpwaStatus bpwa_simulate(const struct BpwaModel *m,
                              double amplitude_ratio,
                              double omega,
                              enum BpwaMotion *out_motion,
                              double *out_power);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPWA_H */
