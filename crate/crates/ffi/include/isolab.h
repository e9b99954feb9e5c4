#ifndef ISOLAB_H
#define ISOLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IsolabStatus {
  ISOLAB_STATUS_OK = 0,
  ISOLAB_STATUS_NULL_POINTER = 1,
  ISOLAB_STATUS_INVALID_ARGUMENT = 2,
  ISOLAB_STATUS_GEOMETRY = 3,
  ISOLAB_STATUS_BILLIARD = 4,
  ISOLAB_STATUS_SPECTRAL = 5,
  ISOLAB_STATUS_PERTURBATION = 6,
  ISOLAB_STATUS_CONFIG = 7,
  ISOLAB_STATUS_IO = 8,
  ISOLAB_STATUS_PANIC = 9,
} IsolabStatus;

typedef struct IsolabEigenpair IsolabEigenpair;

typedef struct IsolabLengthSpectrum IsolabLengthSpectrum;

/**
 * A domain and its partner with mirrored focal bumps.
 */
typedef struct IsolabPair IsolabPair;

/**
 * One bump: `depth · φ((x - center) / half_width)` below the bottom.
 */
typedef struct IsolabBump {
  double center;
  double half_width;
  double depth;
} IsolabBump;

/**
 * Search caps of the periodic-orbit search.
 */
typedef struct IsolabCaps {
  double l_max;
  size_t n_max;
  size_t n_starts;
  uint64_t seed;
} IsolabCaps;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the thread.
 */
const char *isolab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *isolab_version(void);

/**
 * Build the pair on the half-ellipse with semi-axes `a > b`: `omega1`
 * carries the given bumps, `omega2` the mirrored focal bumps.
 *
 * # Safety
 * `outer` and `focal` must point to `n_outer` and `n_focal` bumps (or be
 * null when the count is 0); `out` must be writable.
 */
enum IsolabStatus isolab_pair_new(double a,
                                  double b,
                                  const struct IsolabBump *outer,
                                  size_t n_outer,
                                  const struct IsolabBump *focal,
                                  size_t n_focal,
                                  double corner_rounding,
                                  struct IsolabPair **out_pair);

/**
 * Build the pair from the JSON `geometry` block of a run configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_pair` must be writable.
 */
enum IsolabStatus isolab_pair_from_json(const char *json, struct IsolabPair **out_pair);

/**
 * # Safety
 * `pair` must come from `isolab_pair_new` or `isolab_pair_from_json` and
 * not have been freed; null is ignored.
 */
void isolab_pair_free(struct IsolabPair *pair);

/**
 * Writes 0 for a valid pair, 1 for mirror-image members (dual outer
 * bumps), 2 for identical members (self-dual focal bumps).
 *
 * # Safety
 * `pair` must be a live handle; `out_status` must be writable.
 */
enum IsolabStatus isolab_pair_status(const struct IsolabPair *pair, int *out_status);

/**
 * Sample `n` boundary points of a member (0 base, 1 `omega1`, 2 `omega2`)
 * equally spaced in arc length into `xy` as `x0, y0, x1, y1, ...`.
 *
 * # Safety
 * `pair` must be a live handle; `xy` must hold `2 n` doubles.
 */
enum IsolabStatus isolab_pair_boundary(const struct IsolabPair *pair,
                                       int which,
                                       size_t n,
                                       double *xy);

/**
 * Length spectrum of a member under `caps`.
 *
 * # Safety
 * `pair` must be a live handle; `out_spectrum` must be writable.
 */
enum IsolabStatus isolab_length_spectrum(const struct IsolabPair *pair,
                                         int which,
                                         struct IsolabCaps caps,
                                         struct IsolabLengthSpectrum **out_spectrum);

/**
 * Number of distinct lengths.
 *
 * # Safety
 * `spectrum` must be a live handle or null (which yields 0).
 */
size_t isolab_length_spectrum_len(const struct IsolabLengthSpectrum *spectrum);

/**
 * Entry `index` of the sorted spectrum.
 *
 * # Safety
 * `spectrum` must be a live handle; the outputs must be writable.
 */
enum IsolabStatus isolab_length_spectrum_get(const struct IsolabLengthSpectrum *spectrum,
                                             size_t index,
                                             double *out_length,
                                             size_t *out_multiplicity);

/**
 * Match two spectra computed with identical caps; writes 1 to `out_pass`
 * when every length has a partner within `tol`.
 *
 * # Safety
 * Both spectra must be live handles; the outputs must be writable.
 */
enum IsolabStatus isolab_length_spectra_compare(const struct IsolabLengthSpectrum *first,
                                                const struct IsolabLengthSpectrum *second,
                                                double tol,
                                                int *out_pass,
                                                double *out_max_gap);

/**
 * # Safety
 * `spectrum` must be a live handle or null.
 */
void isolab_length_spectrum_free(struct IsolabLengthSpectrum *spectrum);

/**
 * Lowest Dirichlet eigenpair of a member with `k` in `[k_min, k_max]`,
 * scanned at `n_scan` points with about `n_src` sources (0 for the
 * default).
 *
 * # Safety
 * `pair` must be a live handle; `out_eigen` must be writable.
 */
enum IsolabStatus isolab_ground_state(const struct IsolabPair *pair,
                                      int which,
                                      double k_min,
                                      double k_max,
                                      size_t n_scan,
                                      size_t n_src,
                                      struct IsolabEigenpair **out_eigen);

/**
 * Eigenvalue and its error bar.
 *
 * # Safety
 * `eigen` must be a live handle; the outputs must be writable.
 */
enum IsolabStatus isolab_eigenpair_lambda(const struct IsolabEigenpair *eigen,
                                          double *out_lambda,
                                          double *out_error_bar);

/**
 * Normalized eigenfunction at `(x, y)`, which must lie in the closed
 * domain.
 *
 * # Safety
 * `eigen` must be a live handle; `out_value` must be writable.
 */
enum IsolabStatus isolab_eigenpair_value(const struct IsolabEigenpair *eigen,
                                         double x,
                                         double y,
                                         double *out_value);

/**
 * # Safety
 * `eigen` must be a live handle or null.
 */
void isolab_eigenpair_free(struct IsolabEigenpair *eigen);

/**
 * Run a command-line experiment (e.g. `"certify"`) on a JSON run
 * configuration. The report JSON is returned through `out_report` (free
 * with [`isolab_string_free`]) and the command-line exit code through
 * `out_exit_code`. Data tables are written to `out_dir` unless it is null.
 *
 * # Safety
 * `experiment` and `config_json` must be NUL-terminated strings, `out_dir`
 * a NUL-terminated string or null; the outputs must be writable.
 */
enum IsolabStatus isolab_run(const char *experiment,
                             const char *config_json,
                             const char *out_dir,
                             char **out_report,
                             int *out_exit_code);

/**
 * Release a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void isolab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOLAB_H */
