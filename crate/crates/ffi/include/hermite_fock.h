#ifndef HERMITE_FOCK_H
#define HERMITE_FOCK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `HF_OK` is zero; everything else is an error.
 */
typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  HF_STATUS_INDEX_OUT_OF_BOUNDS = 2,
  HF_STATUS_SINGULAR = 3,
  HF_STATUS_NON_CONVERGENT = 4,
  HF_STATUS_DOMAIN = 5,
  HF_STATUS_INVALID_PARAMETER = 6,
  HF_STATUS_NORM_OVERFLOW = 7,
  HF_STATUS_DIMENSION = 8,
  HF_STATUS_BUFFER_TOO_SMALL = 9,
  HF_STATUS_PANIC = 10,
} HfStatus;

/**
 * Noisy Gaussian state with its factorization data.
 */
typedef struct HfState HfState;

/**
 * Gaussian unitary `S(z) D(α) R(φ)` with its normal-ordering data.
 */
typedef struct HfUnitary HfUnitary;

/**
 * Complex number with the layout of C99 `double _Complex`.
 */
typedef struct HfComplex {
  double re;
  double im;
} HfComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * 0 when there is no pending error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t hf_last_error_message(char *buf, size_t len);

/**
 * `H_n(x, y)`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum HfStatus hf_hkdf(size_t n, struct HfComplex x, struct HfComplex y, struct HfComplex *out);

/**
 * `H_n(x, y) / n!`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum HfStatus hf_hkdf_scaled(size_t n,
                             struct HfComplex x,
                             struct HfComplex y,
                             struct HfComplex *out);

/**
 * Two-index polynomial `H_{m,n}(x,y; z,u | tau)`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum HfStatus hf_hkdf2(size_t m,
                       size_t n,
                       struct HfComplex x,
                       struct HfComplex y,
                       struct HfComplex z,
                       struct HfComplex u,
                       struct HfComplex tau,
                       struct HfComplex *out);

/**
 * Creates a unitary handle. Free it with [`hf_unitary_free`].
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum HfStatus hf_unitary_new(struct HfComplex alpha,
                             double phi,
                             double r,
                             double theta,
                             struct HfUnitary **out);

/**
 * # Safety
 * `h` must be null or come from [`hf_unitary_new`] and not be freed twice.
 */
void hf_unitary_free(struct HfUnitary *h);

/**
 * `<m| U |n>`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for one write.
 */
enum HfStatus hf_unitary_coeff(const struct HfUnitary *h,
                               size_t m,
                               size_t n,
                               struct HfComplex *out);

/**
 * `dim x dim` block of `U`, row-major, into `out[0..len]`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for `len` writes.
 */
enum HfStatus hf_unitary_matrix(const struct HfUnitary *h,
                                size_t dim,
                                struct HfComplex *out,
                                size_t len);

/**
 * Creates a state handle. Free it with [`hf_state_free`].
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum HfStatus hf_state_new(struct HfComplex alpha,
                           double r,
                           double theta,
                           double nbar,
                           struct HfState **out);

/**
 * # Safety
 * `h` must be null or come from [`hf_state_new`] and not be freed twice.
 */
void hf_state_free(struct HfState *h);

/**
 * `ρ_{m,n}`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for one write.
 */
enum HfStatus hf_state_coeff(const struct HfState *h, size_t m, size_t n, struct HfComplex *out);

/**
 * `dim x dim` block of `ρ`, row-major, into `out[0..len]`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for `len` writes.
 */
enum HfStatus hf_state_matrix(const struct HfState *h,
                              size_t dim,
                              struct HfComplex *out,
                              size_t len);

/**
 * Photon-number probabilities `ρ_{m,m}` for `m = 0..=m_max` into
 * `probs[0..len]`; their sum goes to `partial_trace` when it is non-null.
 *
 * # Safety
 * `h` must be a live handle, `probs` valid for `len` writes and
 * `partial_trace` null or valid for one write.
 */
enum HfStatus hf_state_photons(const struct HfState *h,
                               size_t m_max,
                               double *probs,
                               size_t len,
                               double *partial_trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HERMITE_FOCK_H */
