#ifndef SPINLAB_H
#define SPINLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpinlabStatus {
  SPINLAB_STATUS_OK = 0,
  SPINLAB_STATUS_NULL_POINTER = 1,
  SPINLAB_STATUS_INVALID_UTF8 = 2,
  SPINLAB_STATUS_PARSE_ERROR = 3,
  SPINLAB_STATUS_JACOBI_FAILURE = 4,
  SPINLAB_STATUS_INVALID_ARGUMENT = 5,
  SPINLAB_STATUS_BUFFER_TOO_SMALL = 6,
  SPINLAB_STATUS_NO_KERNEL = 7,
  SPINLAB_STATUS_NUMERICAL_ERROR = 8,
  SPINLAB_STATUS_PANIC = 9,
} SpinlabStatus;

/**
 * Opaque metric Lie algebra.
 */
typedef struct SpinlabAlgebra SpinlabAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *spinlab_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *spinlab_last_error_message(void);

/**
 * Parse compact structure equations `(0,0,12,13)` or the line-based algebra format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` a valid pointer.
 */
enum SpinlabStatus spinlab_algebra_parse(const char *text, struct SpinlabAlgebra **out);

/**
 * As [`spinlab_algebra_parse`] with `n` parameter bindings `names[i] = values[i]`.
 *
 * # Safety
 * `names` and `values` must point to `n` elements each (may be null when `n == 0`).
 */
enum SpinlabStatus spinlab_algebra_parse_with_params(const char *text,
                                                     const char *const *names,
                                                     const double *values,
                                                     uintptr_t n,
                                                     struct SpinlabAlgebra **out);

/**
 * Release an algebra. Null is ignored.
 *
 * # Safety
 * `alg` must come from a parse function and not be freed twice.
 */
void spinlab_algebra_free(struct SpinlabAlgebra *alg);

/**
 * # Safety
 * `alg` must be a live handle, `out` a valid pointer.
 */
enum SpinlabStatus spinlab_algebra_dim(const struct SpinlabAlgebra *alg, uintptr_t *out);

/**
 * Whether each `de^k` only involves `e^{ij}` with `i, j < k`.
 *
 * # Safety
 * `alg` must be a live handle, `out` a valid pointer.
 */
enum SpinlabStatus spinlab_algebra_is_nilpotent(const struct SpinlabAlgebra *alg, bool *out);

/**
 * Dimension of the kernel of 4D on invariant spinors, tolerance relative to the spectral norm.
 *
 * # Safety
 * `alg` must be a live handle, `out` a valid pointer.
 */
enum SpinlabStatus spinlab_dirac_kernel_dim(const struct SpinlabAlgebra *alg,
                                            double tol,
                                            uintptr_t *out);

/**
 * Row-major matrix of 4D (or 16D^2 when `squared`). `*size` receives N; the buffer needs N*N
 * entries, otherwise `BufferTooSmall` is returned and nothing is written.
 *
 * # Safety
 * `buf` must hold `len` doubles (may be null when `len == 0`); `size` a valid pointer.
 */
enum SpinlabStatus spinlab_dirac_matrix(const struct SpinlabAlgebra *alg,
                                        bool squared,
                                        double *buf,
                                        uintptr_t len,
                                        uintptr_t *size);

/**
 * `16 D^2 = mu + v j1` for a 5-dimensional algebra; `v` receives 5 values.
 *
 * # Safety
 * `mu` must be valid, `v` must hold 5 doubles.
 */
enum SpinlabStatus spinlab_invariants_dim5(const struct SpinlabAlgebra *alg, double *mu, double *v);

/**
 * Lift kernel vector `index` (0-based) to the product with a flat torus of dimension `8 - n`
 * and report the norm of the Lee form `tau_1` of the Spin(7) structure.
 *
 * # Safety
 * `alg` must be a live handle, `out` a valid pointer.
 */
enum SpinlabStatus spinlab_lift_tau1_norm(const struct SpinlabAlgebra *alg,
                                          uintptr_t index,
                                          double tol,
                                          double *out);

/**
 * Full verification report as JSON. Release with [`spinlab_string_free`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SpinlabStatus spinlab_verify_paper_json(uint64_t seed, char **out);

/**
 * Release a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void spinlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINLAB_H */
