#ifndef HEIS_H
#define HEIS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HeisStatus {
  HeisStatus_Ok = 0,
  HeisStatus_NullPointer = 1,
  HeisStatus_InvalidArgument = 2,
  HeisStatus_SizeLimit = 3,
  HeisStatus_Parse = 4,
  HeisStatus_Convergence = 5,
  HeisStatus_Numerical = 6,
  HeisStatus_Labeling = 7,
  HeisStatus_Domain = 8,
  HeisStatus_Io = 9,
  HeisStatus_BufferTooSmall = 10,
  HeisStatus_Panic = 11,
} HeisStatus;

/**
 * Opaque graph handle.
 */
typedef struct HeisGraph HeisGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next
 * failing call on the same thread.
 */
const char *heis_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *heis_version(void);

/**
 * Box `{1..l}^d` with nearest-neighbour edges.
 */
enum HeisStatus heis_graph_box(uintptr_t d, uintptr_t l, struct HeisGraph **out);

/**
 * The `n`-vertex member of the lexicographically grown box family.
 */
enum HeisStatus heis_graph_lambda(uintptr_t d, uintptr_t n, struct HeisGraph **out);

enum HeisStatus heis_graph_ring(uintptr_t l, struct HeisGraph **out);

/**
 * Loads an edge-list file (`u v [J]` per line).
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
enum HeisStatus heis_graph_load(const char *path, struct HeisGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must come from a `heis_graph_*` constructor and not be freed twice.
 */
void heis_graph_free(struct HeisGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
uintptr_t heis_graph_vertex_count(const struct HeisGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
uintptr_t heis_graph_edge_count(const struct HeisGraph *g);

/**
 * Lowest energy with spin deviate `n`; `+inf` when `n > |V|/2`.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum HeisStatus heis_energy_level(const struct HeisGraph *g, uintptr_t n, double *out);

/**
 * Checks `E_{n'} >= E_n` for all `n' >= n` (strictly `>` when `strict`).
 * `out_margin` receives `min_{n'>n} E_{n'} - E_n`, or `+inf` if `n` is the
 * top level. Either output pointer may be null.
 *
 * # Safety
 * `g` must be a live graph handle; non-null outputs must be writable.
 */
enum HeisStatus heis_foel_check(const struct HeisGraph *g,
                                uintptr_t n,
                                bool strict,
                                double tol,
                                bool *out_holds,
                                double *out_margin);

/**
 * Ascending eigenvalues of the `n`-magnon sector. `out_len` always
 * receives the sector dimension; if `cap` is smaller nothing is copied and
 * `BufferTooSmall` is returned.
 *
 * # Safety
 * `g` must be a live graph handle, `buf` valid for `cap` writes (or null
 * when `cap` is 0), and `out_len` writable.
 */
enum HeisStatus heis_sector_spectrum(const struct HeisGraph *g,
                                     uintptr_t n,
                                     double *buf,
                                     uintptr_t cap,
                                     uintptr_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEIS_H */
