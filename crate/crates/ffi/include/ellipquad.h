#ifndef ELLIPQUAD_H
#define ELLIPQUAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum EqConvention {
  EQ_CONVENTION_RANK_R = 0,
  EQ_CONVENTION_FULL_M = 1,
  EQ_CONVENTION_FULL_N = 2,
} EqConvention;

typedef enum EqStatus {
  EQ_STATUS_OK = 0,
  EQ_STATUS_NULL_POINTER = 1,
  EQ_STATUS_INVALID_UTF8 = 2,
  EQ_STATUS_PARSE = 3,
  EQ_STATUS_INVALID = 4,
  EQ_STATUS_DOMAIN = 5,
  EQ_STATUS_DIMENSION = 6,
  EQ_STATUS_RANK = 7,
  EQ_STATUS_UNSUPPORTED = 8,
  EQ_STATUS_NOT_CONVERGED = 9,
  EQ_STATUS_POLE = 10,
  EQ_STATUS_IO = 11,
  EQ_STATUS_PANIC = 12,
} EqStatus;

/**
 * Opaque quadratic-form model.
 */
typedef struct EqModel EqModel;

typedef struct EqSeriesControl {
  size_t max_degree;
  double rel_tol;
  double abs_tol;
} EqSeriesControl;

/**
 * A series value with its truncation diagnostics. `im` is 0 for real quantities.
 */
typedef struct EqSeriesValue {
  double re;
  double im;
  size_t degree_used;
  double tail_estimate;
  bool converged;
} EqSeriesValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *eq_last_error_message(void);

void eq_clear_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *eq_version(void);

/**
 * Default truncation: degree 40, rel_tol 1e-8, abs_tol 1e-12.
 */
struct EqSeriesControl eq_series_control_default(void);

/**
 * Zonal polynomial C_kappa at the eigenvalues `eigs[0..n]`.
 *
 * # Safety
 * `kappa` and `eigs` must point to `kappa_len` and `n` readable values; `out` must be writable.
 */
enum EqStatus eq_jack_c(uint32_t beta,
                        const size_t *kappa,
                        size_t kappa_len,
                        const double *eigs,
                        size_t n,
                        double *out);

/**
 * Truncated 1F0(a; X) at the eigenvalues of X. A NULL `ctrl` uses the defaults.
 *
 * # Safety
 * `eigs` must point to `n` readable values, `ctrl` must be NULL or valid, `out` must be writable.
 */
enum EqStatus eq_hypergeom_1f0(double a,
                               const double *eigs,
                               size_t n,
                               uint32_t beta,
                               const struct EqSeriesControl *ctrl,
                               struct EqSeriesValue *out);

/**
 * Builds a model from its JSON description (`family`, `a`, `theta`, `sigma`).
 * The convention starts as rank-r and the Pearson sign as analytic.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum EqStatus eq_model_from_json(const char *json, struct EqModel **out);

/**
 * Releases a model. NULL is ignored.
 *
 * # Safety
 * `model` must come from [`eq_model_from_json`] and not be used afterwards.
 */
void eq_model_free(struct EqModel *model);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum EqStatus eq_model_set_convention(struct EqModel *model, enum EqConvention convention);

/**
 * Selects the printed (unsigned) Pearson VII derivative sign when `printed` is true.
 *
 * # Safety
 * `model` must be a live handle.
 */
enum EqStatus eq_model_set_printed_signs(struct EqModel *model, bool printed);

/**
 * Algebra, W dimension m, sample rows n, and rank of A.
 *
 * # Safety
 * `model` must be a live handle; each output pointer may be NULL.
 */
enum EqStatus eq_model_dims(const struct EqModel *model,
                            uint32_t *beta,
                            size_t *m,
                            size_t *n,
                            size_t *rank);

/**
 * Density of W at an m x m Hermitian matrix given row-major, `beta` components per entry.
 *
 * # Safety
 * `model` must be a live handle, `w` must hold `len` values, `ctrl` NULL or valid, `out` writable.
 */
enum EqStatus eq_model_density(const struct EqModel *model,
                               const double *w,
                               size_t len,
                               const struct EqSeriesControl *ctrl,
                               struct EqSeriesValue *out);

/**
 * Characteristic function E etr(i W S) at S, laid out as in [`eq_model_density`].
 *
 * # Safety
 * `model` must be a live handle, `s` must hold `len` values, `ctrl` NULL or valid, `out` writable.
 */
enum EqStatus eq_model_cf(const struct EqModel *model,
                          const double *s,
                          size_t len,
                          const struct EqSeriesControl *ctrl,
                          struct EqSeriesValue *out);

/**
 * Runs a verification suite and returns the report as JSON.
 *
 * `suite` is a built-in name ("default", "quick") or a JSON list of entries.
 * A non-NULL `seed` replaces the entry seeds. `failures` (may be NULL) receives
 * the number of failed checks. Free the string with [`eq_string_free`].
 *
 * # Safety
 * `suite` must be a NUL-terminated string, `seed` NULL or readable, `out_json` writable.
 */
enum EqStatus eq_run_suite(const char *suite,
                           const uint64_t *seed,
                           char **out_json,
                           size_t *failures);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void eq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELLIPQUAD_H */
