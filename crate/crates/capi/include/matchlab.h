#pragma once

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from matchlab-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum MlStatus {
  ML_STATUS_OK = 0,
  ML_STATUS_NULL_POINTER = 1,
  ML_STATUS_INVALID_ARGUMENT = 2,
  ML_STATUS_INVALID_SPEC = 3,
  ML_STATUS_DIMENSION = 4,
  ML_STATUS_NON_FINITE = 5,
  ML_STATUS_SIZE_LIMIT = 6,
  ML_STATUS_IO = 7,
  ML_STATUS_PARSE = 8,
  ML_STATUS_NUMERIC = 9,
  ML_STATUS_BUFFER_TOO_SMALL = 10,
  ML_STATUS_PANIC = 11,
} MlStatus;

// Opaque symmetric matrix handle (adjacency, weights, or an estimate).
typedef struct MlGraph MlGraph;

// Opaque match result handle.
typedef struct MlMatchResult MlMatchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *ml_status_message(enum MlStatus status);

// Library version as a static C string.
const char *ml_version(void);

// Builds a graph handle from a row-major `n * n` buffer.
//
// # Safety
// `data` must point to at least `n * n` readable f64 values; `out` must be
// a valid location to store the handle.
enum MlStatus ml_graph_new_dense(uintptr_t n, const double *data, struct MlGraph **out);

// Loads an edge-list file (`u v` or `u v w` per line, 0-based ids).
// `n_hint = 0` means infer the size from the largest vertex id.
//
// # Safety
// `path` must be a valid NUL-terminated string; `out` must be valid.
enum MlStatus ml_graph_load_edge_list(const char *path,
                                      bool weighted,
                                      uintptr_t n_hint,
                                      struct MlGraph **out);

// Samples a correlated homogeneous pair: marginals `p`/`q`, correlation
// `rho`, deterministic in `seed`.
//
// # Safety
// `out_a` and `out_b` must be valid locations to store the handles.
enum MlStatus ml_sample_pair(uintptr_t n,
                             double p,
                             double q,
                             double rho,
                             uint64_t seed,
                             struct MlGraph **out_a,
                             struct MlGraph **out_b);

// Vertex count of a graph handle (0 for null).
//
// # Safety
// `graph` must be null or a live handle from this library.
uintptr_t ml_graph_n(const struct MlGraph *graph);

// Reads one entry.
//
// # Safety
// `graph` must be a live handle; `out` must be valid.
enum MlStatus ml_graph_get(const struct MlGraph *graph, uintptr_t i, uintptr_t j, double *out);

// Copies the dense row-major matrix into `buf` (`len >= n * n`).
//
// # Safety
// `graph` must be a live handle; `buf` must point to `len` writable f64s.
enum MlStatus ml_graph_copy_dense(const struct MlGraph *graph, double *buf, uintptr_t len);

// Frees a graph handle (null is a no-op).
//
// # Safety
// `graph` must be null or a live handle from this library, not yet freed.
void ml_graph_free(struct MlGraph *graph);

// Singular value thresholding estimate with an explicit threshold; writes a
// new graph handle holding the estimate and optionally the retained rank.
//
// # Safety
// `graph` must be a live handle; `out` must be valid; `out_rank` may be null.
enum MlStatus ml_usvt_estimate(const struct MlGraph *graph,
                               double threshold,
                               bool clip_to_unit,
                               bool hollow_output,
                               struct MlGraph **out,
                               uintptr_t *out_rank);

// Centers `graph` by an explicit-threshold USVT estimate of itself,
// returning `graph - q_hat` as a new handle.
//
// # Safety
// `graph` must be a live handle; `out` must be valid.
enum MlStatus ml_usvt_center(const struct MlGraph *graph,
                             double threshold,
                             bool clip_to_unit,
                             bool hollow_output,
                             struct MlGraph **out);

// Entrywise difference `a - q_hat` as a new handle.
//
// # Safety
// `a` and `q_hat` must be live handles; `out` must be valid.
enum MlStatus ml_center(const struct MlGraph *a, const struct MlGraph *q_hat, struct MlGraph **out);

// Frank-Wolfe graph matching. `init_identity` starts at the identity
// permutation, otherwise at the flat doubly stochastic matrix; `restarts`
// counts total starts (extra starts are seeded random interior points).
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid.
enum MlStatus ml_match(const struct MlGraph *a,
                       const struct MlGraph *b,
                       uintptr_t max_iters,
                       double rel_tol,
                       bool init_identity,
                       uintptr_t restarts,
                       uint64_t seed,
                       struct MlMatchResult **out);

// `||A - P B P^T||_F^2` of a match result.
//
// # Safety
// `result` must be a live handle (NaN is returned for null).
double ml_match_objective(const struct MlMatchResult *result);

// `-tr(A P B P^T)` of a match result.
//
// # Safety
// `result` must be a live handle (NaN is returned for null).
double ml_match_trace_objective(const struct MlMatchResult *result);

// Frank-Wolfe iterations of the winning start (0 for null).
//
// # Safety
// `result` must be null or a live handle.
uintptr_t ml_match_iterations(const struct MlMatchResult *result);

// Whether the winning start converged before the iteration cap.
//
// # Safety
// `result` must be null or a live handle.
bool ml_match_converged(const struct MlMatchResult *result);

// Copies the matched permutation (vertex `i` of A maps to `buf[i]` of B).
//
// # Safety
// `result` must be a live handle; `buf` must point to `len` writable u64s.
enum MlStatus ml_match_permutation(const struct MlMatchResult *result,
                                   uint64_t *buf,
                                   uintptr_t len);

// Fraction of vertices matched to themselves; `core = 0` scores all
// vertices, otherwise only the first `core`.
//
// # Safety
// `result` must be a live handle; `out` must be valid.
enum MlStatus ml_match_accuracy_vs_identity(const struct MlMatchResult *result,
                                            uintptr_t core,
                                            double *out);

// Frees a match result handle (null is a no-op).
//
// # Safety
// `result` must be null or a live handle from this library, not yet freed.
void ml_match_free(struct MlMatchResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
