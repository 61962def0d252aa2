#ifndef HYPJAC_H
#define HYPJAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum HjStatus {
  HJ_STATUS_OK = 0,
  HJ_STATUS_NULL_POINTER = 1,
  HJ_STATUS_INVALID_PARAMETERS = 2,
  HJ_STATUS_OUTSIDE_DOMAIN = 3,
  HJ_STATUS_NO_CONVERGENCE = 4,
  HJ_STATUS_SINGULAR = 5,
  HJ_STATUS_EIGENSOLVER_FAILURE = 6,
  HJ_STATUS_NOT_APPLICABLE = 7,
  HJ_STATUS_TERMINATING = 8,
  HJ_STATUS_SCAN_EXHAUSTED = 9,
  HJ_STATUS_INVALID_ARGUMENT = 10,
  HJ_STATUS_BUFFER_TOO_SMALL = 11,
  HJ_STATUS_PANIC = 12,
} HjStatus;

/**
 * Evaluation route for [`hj_b_function`].
 */
typedef enum HjMethod {
  HJ_METHOD_CONTINUED_FRACTION = 0,
  HJ_METHOD_RESOLVENT = 1,
} HjMethod;

/**
 * Opaque validated parameter triple.
 */
typedef struct HjParams HjParams;

/**
 * Opaque spectral result.
 */
typedef struct HjSpectrum HjSpectrum;

typedef struct HjComplex {
  double re;
  double im;
} HjComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hj_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length without the NUL, or
 * 0 when no error has been recorded.
 */
size_t hj_last_error_message(char *buf, size_t cap);

/**
 * Validates `(a, b, c)` and stores a new handle in `*out`.
 */
enum HjStatus hj_params_new(struct HjComplex a,
                            struct HjComplex b,
                            struct HjComplex c,
                            struct HjParams **out);

/**
 * Releases a handle from [`hj_params_new`]. Null is ignored.
 */
void hj_params_free(struct HjParams *p);

/**
 * Whether all three parameters are real.
 */
bool hj_params_is_real(const struct HjParams *p);

/**
 * `F(a, b, c; z)` by the direct series (inside the disk, or polynomial).
 */
enum HjStatus hj_series(const struct HjParams *p,
                        struct HjComplex z,
                        double tol,
                        struct HjComplex *out);

/**
 * `F(a, b, c; z) / F(a, b + 1, c + 1; z)` by the continued fraction.
 */
enum HjStatus hj_cf_ratio(const struct HjParams *p,
                          struct HjComplex z,
                          double tol,
                          struct HjComplex *out);

/**
 * The m-function `B(a, b, c; z)` off `[-2, 2]`.
 */
enum HjStatus hj_b_function(const struct HjParams *p,
                            struct HjComplex z,
                            enum HjMethod method,
                            double tol,
                            struct HjComplex *out);

/**
 * Discrete spectrum from truncations of order `n` and `2n`.
 */
enum HjStatus hj_spectrum_new(const struct HjParams *p,
                              size_t n,
                              double tol,
                              struct HjSpectrum **out);

/**
 * Releases a handle from [`hj_spectrum_new`]. Null is ignored.
 */
void hj_spectrum_free(struct HjSpectrum *s);

/**
 * Number of retained eigenvalues, 0 for a null handle.
 */
size_t hj_spectrum_len(const struct HjSpectrum *s);

/**
 * Copies the eigenvalues into `buf`; `*len_out` always receives the count.
 */
enum HjStatus hj_spectrum_eigenvalues(const struct HjSpectrum *s,
                                      struct HjComplex *buf,
                                      size_t cap,
                                      size_t *len_out);

/**
 * Hypergeometric zeros `w = -4/(λ - 2)` of the retained eigenvalues.
 */
enum HjStatus hj_spectrum_zeros(const struct HjSpectrum *s,
                                struct HjComplex *buf,
                                size_t cap,
                                size_t *len_out);

/**
 * `Σ dist(λ, [-2, 2])` and the trace-norm bound it must not exceed.
 */
enum HjStatus hj_spectrum_bounds(const struct HjSpectrum *s,
                                 double *distance_sum,
                                 double *trace_bound);

/**
 * Sign signature of a real triple. Terminating fractions yield the
 * signature of their leading block when `allow_terminating` is set.
 */
enum HjStatus hj_sign_signature(const struct HjParams *p,
                                size_t scan_limit,
                                bool allow_terminating,
                                size_t *n_out,
                                size_t *kappa_out,
                                int8_t *epsilons,
                                size_t cap,
                                size_t *len_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPJAC_H */
