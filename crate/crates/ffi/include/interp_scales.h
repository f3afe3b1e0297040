/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef INTERP_SCALES_H
#define INTERP_SCALES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IsKMethod {
  IS_K_METHOD_EXACT = 0,
  IS_K_METHOD_TRUNCATION = 1,
  IS_K_METHOD_CONVEX = 2,
} IsKMethod;

// Result codes. `Ok` is zero; everything else is a failure.
typedef enum IsStatus {
  IS_STATUS_OK = 0,
  IS_STATUS_NULL_POINTER = 1,
  IS_STATUS_INVALID_UTF8 = 2,
  IS_STATUS_PARSE = 3,
  IS_STATUS_INVALID_INPUT = 4,
  IS_STATUS_INVALID_PARAMETER = 5,
  IS_STATUS_DOMAIN = 6,
  IS_STATUS_TRUNCATION = 7,
  IS_STATUS_NUMERICAL_FAILURE = 8,
  IS_STATUS_UNSUPPORTED = 9,
  IS_STATUS_DIVERGENT_TAIL = 10,
  IS_STATUS_BUFFER_TOO_SMALL = 11,
  IS_STATUS_PANIC = 12,
} IsStatus;

// A function of class B.
typedef struct IsBoydFunction IsBoydFunction;

// A pair of sequence spaces.
typedef struct IsCouple IsCouple;

// A symmetric norming function.
typedef struct IsNormingFunction IsNormingFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a
// success. Valid until the next call into this library on the same thread.
const char *is_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *is_version(void);

// Parses a function spec such as `power:0.4` or `phialphap:a=0.5,p=2`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
enum IsStatus is_boyd_parse(const char *spec, struct IsBoydFunction **out);

// # Safety
// `f` must come from [`is_boyd_parse`] and not be used afterwards. Null is ignored.
void is_boyd_free(struct IsBoydFunction *f);

// `φ(t)`.
//
// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum IsStatus is_boyd_evaluate(const struct IsBoydFunction *f, double t, double *out);

// Estimated Boyd indices `β` (lower) and `α` (upper).
//
// # Safety
// `f` must be a live handle; `lower` and `upper` valid pointers.
enum IsStatus is_boyd_indices(const struct IsBoydFunction *f, double *lower, double *upper);

// Parses `phi1`, `phiinf`, `eps:a=<a>` or `eps:a=<a>,p=<p>`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
enum IsStatus is_snf_parse(const char *spec, struct IsNormingFunction **out);

// # Safety
// `f` must come from [`is_snf_parse`] and not be used afterwards. Null is ignored.
void is_snf_free(struct IsNormingFunction *f);

// `Φ` of the decreasing rearrangement of `values[0..len]`.
//
// # Safety
// `f` must be a live handle, `values` must hold `len` doubles, `out` valid.
enum IsStatus is_phi_type_norm(const struct IsNormingFunction *f,
                               const double *values,
                               size_t len,
                               double *out);

// `(Σ [φ(n) a_n]^q / n)^{1/q}`; pass `q = INFINITY` for the sup form.
//
// # Safety
// `phi` must be a live handle, `values` must hold `len` doubles, `out` valid.
enum IsStatus is_lorentz_marcinkiewicz_norm(const struct IsBoydFunction *phi,
                                            double q,
                                            const double *values,
                                            size_t len,
                                            double *out);

// Builds a couple from two space specs such as `lp:1` and `lp:inf`.
//
// # Safety
// `e0`, `e1` must be NUL-terminated strings and `out` a valid pointer.
enum IsStatus is_couple_parse(const char *e0, const char *e1, struct IsCouple **out);

// # Safety
// `c` must come from [`is_couple_parse`] and not be used afterwards. Null is ignored.
void is_couple_free(struct IsCouple *c);

// `K(t, x)` for the couple.
//
// # Safety
// `couple` must be a live handle, `values` must hold `len` doubles, `out` valid.
enum IsStatus is_k_functional(const struct IsCouple *couple,
                              enum IsKMethod method,
                              double t,
                              const double *values,
                              size_t len,
                              double *out);

// The `(E₀,E₁)_{φ,q}` norm with the default quadrature.
//
// # Safety
// Handles must be live, `values` must hold `len` doubles, `out` valid.
enum IsStatus is_interpolation_norm(const struct IsCouple *couple,
                                    const struct IsBoydFunction *phi,
                                    double q,
                                    enum IsKMethod method,
                                    const double *values,
                                    size_t len,
                                    double *out);

// Singular values of the row-major `rows × cols` matrix, largest first.
// `out` must have room for `min(rows, cols)` values; `out_len` receives
// the count written (or required, on [`IsStatus::BufferTooSmall`]).
//
// # Safety
// `entries` must hold `rows * cols` doubles, `out` must hold `capacity`
// doubles, `out_len` must be valid.
enum IsStatus is_approximation_numbers(const double *entries,
                                       size_t rows,
                                       size_t cols,
                                       double *out,
                                       size_t capacity,
                                       size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INTERP_SCALES_H */
