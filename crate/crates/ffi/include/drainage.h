#ifndef DRAINAGE_H
#define DRAINAGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum DrainageStatus {
  DRAINAGE_STATUS_OK = 0,
  DRAINAGE_STATUS_NULL_POINTER = 1,
  DRAINAGE_STATUS_INVALID_PARAMETER = 2,
  DRAINAGE_STATUS_DIMENSION_MISMATCH = 3,
  DRAINAGE_STATUS_SEARCH_EXCEEDED = 4,
  DRAINAGE_STATUS_OUT_OF_RANGE = 5,
  DRAINAGE_STATUS_TOO_LARGE = 6,
  DRAINAGE_STATUS_IO = 7,
  DRAINAGE_STATUS_PANIC = 8,
} DrainageStatus;

// Environment and successor rule for fixed `(d, p, seed)`.
typedef struct DrainageModel DrainageModel;

// Vertices of a traced path.
typedef struct DrainagePath DrainagePath;

// Outcome of running two walkers until they meet or pass the level cap.
typedef struct DrainageCoalescence {
  uint64_t n_steps;
  int64_t t_at_coalescence;
  bool hit_cap;
} DrainageCoalescence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *drainage_status_message(enum DrainageStatus status);

// Message of the last failed call on this thread, or null if none.
//
// # Safety
// The pointer stays valid until the next failing call on the same thread.
const char *drainage_last_error(void);

// Creates a model. A `max_search_height` of 0 selects the default.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum DrainageStatus drainage_model_new(size_t d,
                                       double p,
                                       uint64_t seed,
                                       uint32_t max_search_height,
                                       struct DrainageModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from [`drainage_model_new`] and not be used afterwards.
void drainage_model_free(struct DrainageModel *model);

// Label `U_w` of the vertex with `d` coordinates at `coords`.
//
// # Safety
// `model` must be a live handle, `coords` must point to `d` values and
// `out` must be writable.
enum DrainageStatus drainage_uniform_at(const struct DrainageModel *model,
                                        const int64_t *coords,
                                        size_t d,
                                        double *out);

// Whether the vertex at `coords` is open.
//
// # Safety
// Same requirements as [`drainage_uniform_at`].
enum DrainageStatus drainage_is_open(const struct DrainageModel *model,
                                     const int64_t *coords,
                                     size_t d,
                                     bool *out);

// Successor of the vertex at `coords`, written to `out_coords` (`d`
// values), with the level increment in `out_jump`.
//
// # Safety
// `model` must be a live handle, `coords` and `out_coords` must each hold
// `d` values and `out_jump` must be writable.
enum DrainageStatus drainage_successor(const struct DrainageModel *model,
                                       const int64_t *coords,
                                       size_t d,
                                       int64_t *out_coords,
                                       uint32_t *out_jump);

// Traces the path from `coords` until its level reaches `horizon` above
// the start.
//
// # Safety
// `model` must be a live handle, `coords` must hold `d` values and `out`
// must be writable.
enum DrainageStatus drainage_trace(const struct DrainageModel *model,
                                   const int64_t *coords,
                                   size_t d,
                                   int64_t horizon,
                                   struct DrainagePath **out);

// Number of vertices on a path, including the start. Zero for null.
//
// # Safety
// `path` must be null or a live handle.
size_t drainage_path_len(const struct DrainagePath *path);

// Copies vertex `index` of a path into `out_coords`, which must hold `d`
// values for the path's dimension.
//
// # Safety
// `path` must be a live handle and `out_coords` must have room for `d`
// values.
enum DrainageStatus drainage_path_vertex(const struct DrainagePath *path,
                                         size_t index,
                                         int64_t *out_coords);

// First spatial coordinate of the interpolated path at level `t`.
//
// # Safety
// `path` must be a live handle and `out` must be writable.
enum DrainageStatus drainage_path_at(const struct DrainagePath *path, double t, double *out);

// Releases a path. Null is ignored.
//
// # Safety
// `path` must come from [`drainage_trace`] and not be used afterwards.
void drainage_path_free(struct DrainagePath *path);

// Runs walkers from `(0,0)` and `(x,0)` in a planar model until they meet
// or the common level exceeds `t_cap`.
//
// # Safety
// `model` must be a live handle and `out` must be writable.
enum DrainageStatus drainage_pair_coalescence(const struct DrainageModel *model,
                                              int64_t x,
                                              int64_t t_cap,
                                              struct DrainageCoalescence *out);

// `P{Y_1 > m}` in the planar model.
//
// # Safety
// `out` must be writable.
enum DrainageStatus drainage_y_tail(double p, uint32_t m, double *out);

// Mean level increment `gamma(p)` in the planar model.
//
// # Safety
// `out` must be writable.
enum DrainageStatus drainage_gamma_exact(double p, double *out);

// Variance `sigma^2(p)` of the spatial increment in the planar model.
//
// # Safety
// `out` must be writable.
enum DrainageStatus drainage_sigma2_exact(double p, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRAINAGE_H */
