#ifndef SPECHC_H
#define SPECHC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SpechcStatus {
  SPECHC_STATUS_OK = 0,
  SPECHC_STATUS_NULL_POINTER = 1,
  // Bad edge data: weights, self-loops, duplicates.
  SPECHC_STATUS_INVALID_GRAPH = 2,
  // Bad parameter: k, gamma, eta.
  SPECHC_STATUS_INVALID_ARGUMENT = 3,
  SPECHC_STATUS_DISCONNECTED = 4,
  SPECHC_STATUS_NO_CONVERGENCE = 5,
  // Tree and graph disagree on the vertex set.
  SPECHC_STATUS_LEAF_MISMATCH = 6,
  SPECHC_STATUS_IO = 7,
  SPECHC_STATUS_INTERNAL = 8,
  SPECHC_STATUS_PANIC = 9,
} SpechcStatus;

// Opaque graph handle.
typedef struct SpechcGraph SpechcGraph;

// Opaque hierarchical clustering tree handle.
typedef struct SpechcTree SpechcTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *spechc_last_error(void);

// Builds a graph from `m` edges `(us[i], vs[i], ws[i])`. Vertex ids are
// arbitrary `u64` values, compacted in order of first appearance.
// Repeated pairs are rejected unless `merge_duplicates` is set.
//
// # Safety
// `us`, `vs` and `ws` must each point to `m` readable values; `out` must be
// writable.
enum SpechcStatus spechc_graph_from_edges(const uint64_t *us,
                                          const uint64_t *vs,
                                          const double *ws,
                                          size_t m,
                                          bool merge_duplicates,
                                          struct SpechcGraph **out);

// # Safety
// `g` must be null or a handle from this library, not yet freed.
void spechc_graph_free(struct SpechcGraph *g);

// Vertex count; 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t spechc_graph_n(const struct SpechcGraph *g);

// Edge count; 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t spechc_graph_m(const struct SpechcGraph *g);

// Original id of compacted vertex `index`; tree leaves use compacted ids.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum SpechcStatus spechc_graph_vertex_id(const struct SpechcGraph *g, size_t index, uint64_t *out);

// Spectral clustering into `k` parts, degree bucketing and recursive
// sparsest cut. `gamma <= 0` derives the bucket exponent from the weights.
// `out_cost` may be null.
//
// # Safety
// `g` must be a live graph handle; `out_tree` writable; `out_cost` null or
// writable.
enum SpechcStatus spechc_spec_wrsc(const struct SpechcGraph *g,
                                   size_t k,
                                   double gamma,
                                   uint64_t seed,
                                   struct SpechcTree **out_tree,
                                   double *out_cost);

// Caterpillar variant. `eta <= 0` sweeps the bucket ratio.
//
// # Safety
// As for [`spechc_spec_wrsc`].
enum SpechcStatus spechc_caterpillar(const struct SpechcGraph *g,
                                     size_t k,
                                     double eta,
                                     uint64_t seed,
                                     struct SpechcTree **out_tree,
                                     double *out_cost);

// Agglomerative average linkage.
//
// # Safety
// As for [`spechc_spec_wrsc`].
enum SpechcStatus spechc_average_linkage(const struct SpechcGraph *g,
                                         struct SpechcTree **out_tree,
                                         double *out_cost);

// Dasgupta cost of `t` on `g`.
//
// # Safety
// `g` and `t` must be live handles; `out` writable.
enum SpechcStatus spechc_dasgupta_cost(const struct SpechcGraph *g,
                                       const struct SpechcTree *t,
                                       double *out);

// Leaf count; 0 for a null handle.
//
// # Safety
// `t` must be null or a live tree handle.
size_t spechc_tree_leaves(const struct SpechcTree *t);

// Height in edges; 0 for a null handle.
//
// # Safety
// `t` must be null or a live tree handle.
size_t spechc_tree_height(const struct SpechcTree *t);

// Tree as a JSON document, released with [`spechc_string_free`].
//
// # Safety
// `t` must be a live tree handle and `out` writable.
enum SpechcStatus spechc_tree_to_json(const struct SpechcTree *t, char **out);

// Parses a tree produced by [`spechc_tree_to_json`].
//
// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum SpechcStatus spechc_tree_from_json(const char *json, struct SpechcTree **out);

// # Safety
// `t` must be null or a handle from this library, not yet freed.
void spechc_tree_free(struct SpechcTree *t);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void spechc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECHC_H */
