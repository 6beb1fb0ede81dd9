#ifndef NEARFIELD_H
#define NEARFIELD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum NfStatus {
  NF_STATUS_OK = 0,
  NF_STATUS_NULL_POINTER = 1,
  /**
   * Invalid scenario or argument; exit code 2 in the CLI.
   */
  NF_STATUS_INVALID_CONFIG = 2,
  /**
   * Singular geometry or null channel; exit code 3 in the CLI.
   */
  NF_STATUS_DOMAIN_ERROR = 3,
  NF_STATUS_BUFFER_TOO_SMALL = 4,
  NF_STATUS_PANIC = 5,
} NfStatus;

typedef enum NfModel {
  NF_MODEL_EXACT = 0,
  NF_MODEL_NEAR = 1,
  NF_MODEL_FAR = 2,
} NfModel;

/**
 * Opaque scenario handle.
 */
typedef struct NfScenario NfScenario;

/**
 * Plain-data scenario description. Fill it with
 * [`nf_scenario_default_config`] and override fields as needed.
 */
typedef struct NfScenarioConfig {
  double frequency_hz;
  size_t nx;
  size_t ny;
  double element_side_over_lambda;
  double spacing_over_lambda;
  size_t quadrature_order;
} NfScenarioConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Writes the reference configuration (30 GHz, 20 × 200 half-wavelength
 * patches, order-8 quadrature) into `out`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum NfStatus nf_scenario_default_config(struct NfScenarioConfig *out);

/**
 * Validates `config`, builds the array and stores a new handle in `*out`.
 * Free it with [`nf_scenario_free`].
 *
 * # Safety
 * `config` must be null or point to a valid config; `out` must be null or
 * valid for writes.
 */
enum NfStatus nf_scenario_new(const struct NfScenarioConfig *config, struct NfScenario **out);

/**
 * Releases a handle. Null is a no-op.
 *
 * # Safety
 * `h` must be null or a handle from [`nf_scenario_new`] not yet freed.
 */
void nf_scenario_free(struct NfScenario *h);

/**
 * Number of array elements N, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t nf_scenario_element_count(const struct NfScenario *h);

/**
 * Wavelength in meters, or NaN for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
double nf_scenario_wavelength(const struct NfScenario *h);

/**
 * Near-field kernel between receiver `r` and source `s`.
 *
 * # Safety
 * `h` must be a live handle, `r` and `s` readable `double[3]`, and the
 * outputs writable.
 */
enum NfStatus nf_kernel_near(const struct NfScenario *h,
                             const double *r,
                             const double *s,
                             double *out_re,
                             double *out_im);

/**
 * Far-field kernel between receiver `r` and source `s`.
 *
 * # Safety
 * As for [`nf_kernel_near`].
 */
enum NfStatus nf_kernel_far(const struct NfScenario *h,
                            const double *r,
                            const double *s,
                            double *out_re,
                            double *out_im);

/**
 * Full Green's dyad at displacement `x`, written row-major as interleaved
 * `(re, im)` pairs into `out[18]`.
 *
 * # Safety
 * `x` readable `double[3]`, `out` writable `double[18]`.
 */
enum NfStatus nf_green_exact(const struct NfScenario *h, const double *x, double *out);

/**
 * Channel vector at `r` into `out_re[len]`, `out_im[len]`. `len` must be
 * at least N; entries follow the array's row-major, x-fastest order.
 *
 * # Safety
 * Output buffers must be writable for `len` doubles each.
 */
enum NfStatus nf_channel_vector(const struct NfScenario *h,
                                enum NfModel model,
                                const double *r,
                                double *out_re,
                                double *out_im,
                                size_t len);

/**
 * Received power at `eval` with a matched filter focused at `focus`.
 *
 * # Safety
 * `focus`, `eval` readable `double[3]`; `out` writable.
 */
enum NfStatus nf_beam_power(const struct NfScenario *h,
                            enum NfModel model,
                            const double *focus,
                            const double *eval,
                            double *out);

/**
 * Power in dB relative to the near-model power at `(0, 0, 0.1)` m. The
 * result is clamped at -200 dB; `*out_floored` is set to 1 when clamped.
 *
 * # Safety
 * `h` must be a live, exclusively borrowed handle (the reference power is
 * cached on first use); outputs writable.
 */
enum NfStatus nf_normalized_power_db(struct NfScenario *h,
                                     double power,
                                     double *out_db,
                                     int32_t *out_floored);

/**
 * Aperture diagonal D and Fraunhofer distance 2D²/λ, both in meters.
 *
 * # Safety
 * Outputs writable.
 */
enum NfStatus nf_fraunhofer(const struct NfScenario *h, double *out_diagonal, double *out_distance);

/**
 * Greedy SIR-constrained user selection.
 *
 * `positions` holds `k` receivers as `k × 3` doubles. Selected indices are
 * written nearest first into `out_indices[capacity]` and their number into
 * `*out_count`. When `capacity` is too small, `*out_count` still receives
 * the required size and [`NfStatus::BufferTooSmall`] is returned.
 *
 * # Safety
 * `positions` readable for `3·k` doubles; `out_indices` writable for
 * `capacity` entries; `out_count` writable.
 */
enum NfStatus nf_schedule(const struct NfScenario *h,
                          enum NfModel model,
                          const double *positions,
                          size_t k,
                          double gamma_db,
                          size_t *out_indices,
                          size_t capacity,
                          size_t *out_count);

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to fit, into `buf[len]`. Returns the full message length in
 * bytes, excluding the terminator; 0 means no error.
 *
 * # Safety
 * `buf` must be null or writable for `len` bytes.
 */
size_t nf_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEARFIELD_H */
