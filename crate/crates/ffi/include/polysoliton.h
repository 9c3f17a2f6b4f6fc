#ifndef POLYSOLITON_H
#define POLYSOLITON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_DIMENSION = 3,
  PS_STATUS_NON_FINITE = 4,
  PS_STATUS_TOO_FEW_VERTICES = 5,
  PS_STATUS_REQUIRES_CLOSED = 6,
  PS_STATUS_NOT_CONVERGED = 7,
  PS_STATUS_SOLITON_CHECK = 8,
  PS_STATUS_UNKNOWN_PRESET = 9,
  PS_STATUS_BUFFER_TOO_SMALL = 10,
  PS_STATUS_PANIC = 11,
} PsStatus;

/**
 * A closed polygon or an open window of vertices.
 */
typedef struct PsPolygon PsPolygon;

/**
 * A soliton curve `c'' = Bc + d`, `c(0) = v`, `c'(0) = w`.
 */
typedef struct PsSpec PsSpec;

/**
 * Summary returned by [`ps_polygon_verify`].
 */
typedef struct PsReport {
  double max_residual;
  int64_t argmax_index;
  bool rank_deficient;
} PsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL after a success.
 *
 * The string stays valid until the next `ps_` call on the same thread.
 */
const char *ps_last_error(void);

/**
 * Builds a curve spec in `R^n`. `b` holds `n*n` entries; `d`, `v`, `w` hold `n`.
 * A NULL `d` means `d = 0`.
 *
 * # Safety
 * Non-NULL pointers must reference arrays of the stated lengths; `out` must be writable.
 */
enum PsStatus ps_spec_new(size_t n,
                          const double *b,
                          const double *d,
                          const double *v,
                          const double *w,
                          struct PsSpec **out);

/**
 * Looks up a catalogue curve by name (`"intro"`, `"1a"`, …, `"6"`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum PsStatus ps_zoo_preset(const char *name, struct PsSpec **out);

/**
 * # Safety
 * `spec` must be NULL or a handle from this library that has not been freed.
 */
void ps_spec_free(struct PsSpec *spec);

/**
 * Ambient dimension of the curve, or 0 for a NULL handle.
 *
 * # Safety
 * `spec` must be NULL or a live handle.
 */
size_t ps_spec_dim(const struct PsSpec *spec);

/**
 * Writes `c(t)` to `out[0..n]`.
 *
 * # Safety
 * `spec` must be a live handle and `out` must hold `n` doubles.
 */
enum PsStatus ps_spec_eval(const struct PsSpec *spec, double t, double *out);

/**
 * Writes the map `(A(s), b(s))` with `T(c(· ; s)) = A c + b`: `a_out` gets
 * `n*n` row-major entries and `b_out` gets `n`.
 *
 * # Safety
 * `spec` must be a live handle; the output arrays must have the stated lengths.
 */
enum PsStatus ps_spec_affine_family(const struct PsSpec *spec,
                                    double s,
                                    double *a_out,
                                    double *b_out);

/**
 * Polygon of curve samples `x_j = c(t0 + j*step)` for `j_min ≤ j ≤ j_max`.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum PsStatus ps_spec_sample(const struct PsSpec *spec,
                             double t0,
                             double step,
                             int64_t j_min,
                             int64_t j_max,
                             struct PsPolygon **out);

/**
 * Matrix cosine and sine series `co_B(t)`, `si_B(t)` for an `n × n` matrix `b`.
 *
 * # Safety
 * `b`, `co_out` and `si_out` must each hold `n*n` doubles.
 */
enum PsStatus ps_co_si(size_t n, const double *b, double t, double *co_out, double *si_out);

/**
 * The scalar `b` with `(1 + cos_b(s))/2 = lambda`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PsStatus ps_invert_f_scalar(double lambda, double s, double *out);

/**
 * Closed polygon from `count` vertices in `R^dim`.
 *
 * # Safety
 * `coords` must hold `count*dim` doubles; `out` must be writable.
 */
enum PsStatus ps_polygon_new_closed(size_t dim,
                                    size_t count,
                                    const double *coords,
                                    struct PsPolygon **out);

/**
 * Open window of `count` vertices whose first index is `j_min`.
 *
 * # Safety
 * `coords` must hold `count*dim` doubles; `out` must be writable.
 */
enum PsStatus ps_polygon_new_open(int64_t j_min,
                                  size_t dim,
                                  size_t count,
                                  const double *coords,
                                  struct PsPolygon **out);

/**
 * Regular `n`-gon traversed with step `k`; `mu_out` (may be NULL) receives its
 * eigenvalue under the shortening map.
 *
 * # Safety
 * `out` must be writable; `mu_out` must be NULL or writable.
 */
enum PsStatus ps_eigenpolygon(size_t n, size_t k, struct PsPolygon **out, double *mu_out);

/**
 * # Safety
 * `polygon` must be NULL or a handle from this library that has not been freed.
 */
void ps_polygon_free(struct PsPolygon *polygon);

/**
 * Number of stored vertices, or 0 for a NULL handle.
 *
 * # Safety
 * `polygon` must be NULL or a live handle.
 */
size_t ps_polygon_len(const struct PsPolygon *polygon);

/**
 * Dimension of the vertices, or 0 for a NULL handle.
 *
 * # Safety
 * `polygon` must be NULL or a live handle.
 */
size_t ps_polygon_dim(const struct PsPolygon *polygon);

/**
 * Whether the polygon is closed. Open windows report their index range through
 * `j_min_out`/`j_max_out` (either may be NULL).
 *
 * # Safety
 * `polygon` must be a live handle; non-NULL outputs must be writable.
 */
enum PsStatus ps_polygon_topology(const struct PsPolygon *polygon,
                                  bool *closed_out,
                                  int64_t *j_min_out,
                                  int64_t *j_max_out);

/**
 * Copies the coordinates into `out`, vertex after vertex. `capacity` is the
 * number of doubles available; `len * dim` are needed.
 *
 * # Safety
 * `polygon` must be a live handle and `out` must hold `capacity` doubles.
 */
enum PsStatus ps_polygon_vertices(const struct PsPolygon *polygon, double *out, size_t capacity);

/**
 * `x_j ↦ α x_{j−1} + (1 − 2α) x_j + α x_{j+1}`; `alpha = 0.25` is the standard map.
 *
 * # Safety
 * `polygon` must be a live handle; `out` must be writable.
 */
enum PsStatus ps_polygon_shorten(const struct PsPolygon *polygon,
                                 double alpha,
                                 struct PsPolygon **out);

/**
 * `x_j ↦ ½(x_j + x_{j+1})`.
 *
 * # Safety
 * `polygon` must be a live handle; `out` must be writable.
 */
enum PsStatus ps_polygon_midpoint(const struct PsPolygon *polygon, struct PsPolygon **out);

/**
 * Closed polygon evolved for time `s ≥ 0` under `dx_j/ds = x_{j−1} − 2x_j + x_{j+1}`.
 *
 * # Safety
 * `polygon` must be a live handle; `out` must be writable.
 */
enum PsStatus ps_polygon_evolve(const struct PsPolygon *polygon, double s, struct PsPolygon **out);

/**
 * Residual of `T(x)_j = A x_j + b` over the interior vertices.
 *
 * With `map_a` and `map_b` both NULL the map is fitted by least squares and,
 * when `fit_a_out`/`fit_b_out` are non-NULL, written there (`dim*dim` and `dim`
 * doubles). Otherwise `map_a`/`map_b` give the map to test.
 *
 * # Safety
 * `polygon` must be a live handle, `report` writable, and every non-NULL array
 * must have the stated length.
 */
enum PsStatus ps_polygon_verify(const struct PsPolygon *polygon,
                                const double *map_a,
                                const double *map_b,
                                struct PsReport *report,
                                double *fit_a_out,
                                double *fit_b_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYSOLITON_H */
