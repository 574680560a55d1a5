#ifndef BSFWM_H
#define BSFWM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call.
 */
typedef enum BsfwmStatus {
  BSFWM_STATUS_OK = 0,
  /**
   * Invalid configuration, parameter or index.
   */
  BSFWM_STATUS_INVALID_INPUT = 1,
  /**
   * Integrator, oracle or other numerical failure.
   */
  BSFWM_STATUS_NUMERICAL = 2,
  /**
   * Fit failure or degenerate data.
   */
  BSFWM_STATUS_FIT = 3,
  /**
   * A required pointer was null.
   */
  BSFWM_STATUS_NULL_POINTER = 5,
  /**
   * Caller-supplied buffer is too small.
   */
  BSFWM_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * Internal panic; the handle arguments should be considered poisoned.
   */
  BSFWM_STATUS_PANIC = 7,
} BsfwmStatus;

typedef enum BsfwmTransferKind {
  BSFWM_TRANSFER_KIND_IDEAL = 0,
  BSFWM_TRANSFER_KIND_GENERAL = 1,
  BSFWM_TRANSFER_KIND_LOSSY = 2,
} BsfwmTransferKind;

typedef enum BsfwmCheck {
  BSFWM_CHECK_CLASSICAL = 0,
  BSFWM_CHECK_QUANTUM = 1,
  BSFWM_CHECK_ALL = 2,
} BsfwmCheck;

/**
 * Opaque experiment configuration.
 */
typedef struct BsfwmConfig BsfwmConfig;

/**
 * Opaque transfer matrix.
 */
typedef struct BsfwmTransfer BsfwmTransfer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bsfwm_version(void);

/**
 * Copies the calling thread's last error message.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null; `needed` may be null.
 */
enum BsfwmStatus bsfwm_last_error(char *buf, size_t len, size_t *needed);

/**
 * Built-in three-mode default configuration.
 *
 * # Safety
 * `out` must be a valid pointer; the handle is released with [`bsfwm_config_free`].
 */
enum BsfwmStatus bsfwm_config_default(struct BsfwmConfig **out);

/**
 * Parses and validates a JSON configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
 */
enum BsfwmStatus bsfwm_config_from_json(const char *json, struct BsfwmConfig **out);

/**
 * Serializes a configuration as pretty JSON.
 *
 * # Safety
 * `cfg` must be a live handle; `buf` must hold `len` bytes or be null.
 */
enum BsfwmStatus bsfwm_config_to_json(const struct BsfwmConfig *cfg,
                                      char *buf,
                                      size_t len,
                                      size_t *needed);

/**
 * Number of weak modes of a configuration.
 *
 * # Safety
 * `cfg` must be a live handle or null (returns 0).
 */
size_t bsfwm_config_modes(const struct BsfwmConfig *cfg);

/**
 * # Safety
 * `cfg` must come from this library and not be used afterwards.
 */
void bsfwm_config_free(struct BsfwmConfig *cfg);

/**
 * Ideal N-mode beamsplitter at nonlinear phase `phi`.
 *
 * # Safety
 * `out` must be a valid pointer; release the handle with [`bsfwm_transfer_free`].
 */
enum BsfwmStatus bsfwm_transfer_ideal(size_t n, double phi, struct BsfwmTransfer **out);

/**
 * Transfer matrix of a configuration. When `use_phi` is zero the configured
 * pump powers set the phase.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
enum BsfwmStatus bsfwm_transfer_from_config(const struct BsfwmConfig *cfg,
                                            enum BsfwmTransferKind kind,
                                            double phi,
                                            int32_t use_phi,
                                            struct BsfwmTransfer **out);

/**
 * Matrix dimension, or 0 for a null handle.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
size_t bsfwm_transfer_modes(const struct BsfwmTransfer *t);

/**
 * Copies the N×N entries row-major into `re` and `im` (each of length `len ≥ N²`).
 *
 * # Safety
 * `t` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum BsfwmStatus bsfwm_transfer_entries(const struct BsfwmTransfer *t,
                                        double *re,
                                        double *im,
                                        size_t len);

/**
 * `max |U†U − s²I|`, with `s` the uniform loss scale of lossy matrices.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum BsfwmStatus bsfwm_transfer_unitarity_residual(const struct BsfwmTransfer *t, double *out);

/**
 * # Safety
 * `t` must come from this library and not be used afterwards.
 */
void bsfwm_transfer_free(struct BsfwmTransfer *t);

/**
 * Singles and normalized cross-correlations of the configured input through `t`.
 *
 * `singles` receives N values. `g2` receives the N(N−1)/2 pairs in
 * lexicographic order; undefined normalizations are written as NaN.
 *
 * # Safety
 * Handles must be live; `singles` and `g2` must hold `n_singles` and `n_pairs` doubles.
 */
enum BsfwmStatus bsfwm_correlations(const struct BsfwmConfig *cfg,
                                    const struct BsfwmTransfer *t,
                                    double *singles,
                                    size_t n_singles,
                                    double *g2,
                                    size_t n_pairs);

/**
 * Phase-averaged dual-coherent cross-correlation `(1 − (N−2)|q|²)²`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BsfwmStatus bsfwm_g2_dual_coherent(size_t n, double phi, double *out);

/**
 * Fits κ in `φ = κP` to a normalized input-channel depletion curve.
 *
 * # Safety
 * `powers` and `values` must hold `len` doubles; `kappa` must be valid.
 */
enum BsfwmStatus bsfwm_fit_phase_scale(const double *powers,
                                       const double *values,
                                       size_t len,
                                       size_t n_modes,
                                       double *kappa);

/**
 * Runs the closed-form versus oracle comparison. `passed` is set to 1 when
 * every error is within `tol`.
 *
 * # Safety
 * `cfg` must be a live handle; `max_error` and `passed` must be valid.
 */
enum BsfwmStatus bsfwm_oracle_check(const struct BsfwmConfig *cfg,
                                    enum BsfwmCheck check,
                                    double tol,
                                    double *max_error,
                                    int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BSFWM_H */
