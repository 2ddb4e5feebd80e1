#ifndef KNE_H
#define KNE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define KNE_KERNEL_GAUSS 0

#define KNE_KERNEL_SCH 1

// Result codes of every fallible call.
typedef enum KneStatus {
  KNE_OK = 0,
  KNE_ERR_NULL_POINTER = 1,
  KNE_ERR_INVALID_ARGUMENT = 2,
  KNE_ERR_IO = 3,
  KNE_ERR_PARSE = 4,
  KNE_ERR_DATA = 5,
  KNE_ERR_DIMENSION = 6,
  KNE_ERR_NUMERICAL = 7,
  KNE_ERR_PANIC = 8,
} KneStatus;

// An undirected graph.
typedef struct KneGraph KneGraph;

// Trained center embeddings with their node tokens.
typedef struct KneModel KneModel;

// Walk and training settings; fill with [`kne_train_options_default`].
typedef struct KneTrainOptions {
  uint32_t num_walks;
  uint32_t walk_length;
  uint32_t window;
  double p;
  double q;
  uint32_t dim;
  uint32_t negatives;
  uint32_t epochs;
  double lr;
  // `KNE_KERNEL_GAUSS` or `KNE_KERNEL_SCH`.
  uint32_t kernel;
  // σ² for the Gaussian kernel, α for Schoenberg.
  double kernel_param;
  uint64_t seed;
  uint32_t threads;
  // Nonzero: single worker, bit-reproducible.
  uint8_t deterministic;
} KneTrainOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *kne_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *kne_version(void);

// Loads a whitespace-separated edge list.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum KneStatus kne_graph_load(const char *path, struct KneGraph **out);

// Builds a graph on nodes `0..n` from `m` edges `(src[i], dst[i])`. Node
// tokens are the decimal ids.
//
// # Safety
// `src` and `dst` must point to `m` readable values; `out` must be valid.
enum KneStatus kne_graph_from_edges(const uint32_t *src,
                                    const uint32_t *dst,
                                    uintptr_t m,
                                    uintptr_t n,
                                    struct KneGraph **out);

// Largest connected component as a new graph.
//
// # Safety
// `graph` must be a live handle and `out` a valid pointer.
enum KneStatus kne_graph_lcc(const struct KneGraph *graph, struct KneGraph **out);

// Node count, or 0 for NULL.
//
// # Safety
// `graph` must be NULL or a live handle.
uintptr_t kne_graph_node_count(const struct KneGraph *graph);

// Undirected edge count, or 0 for NULL.
//
// # Safety
// `graph` must be NULL or a live handle.
uintptr_t kne_graph_edge_count(const struct KneGraph *graph);

// # Safety
// `graph` must be NULL or a handle not freed before.
void kne_graph_free(struct KneGraph *graph);

// Default settings: 80 walks of length 10, window 10, p = q = 1, d = 128,
// 5 negatives, one epoch, lr 0.025, Gaussian σ² = 2, seed 0, one thread.
//
// # Safety
// `out` must be NULL or valid for writes.
void kne_train_options_default(struct KneTrainOptions *out);

// Generates walks on `graph` and trains embeddings.
//
// # Safety
// `graph` must be a live handle; `options` NULL (defaults) or valid;
// `out` valid for writes.
enum KneStatus kne_train(const struct KneGraph *graph,
                         const struct KneTrainOptions *options,
                         struct KneModel **out);

// Embedding dimension, or 0 for NULL.
//
// # Safety
// `model` must be NULL or a live handle.
uintptr_t kne_model_dim(const struct KneModel *model);

// Number of embedded nodes, or 0 for NULL.
//
// # Safety
// `model` must be NULL or a live handle.
uintptr_t kne_model_node_count(const struct KneModel *model);

// Copies the row-major `node_count × dim` center embeddings into `buf`,
// which must hold exactly `len` doubles with `len == node_count · dim`.
//
// # Safety
// `model` must be a live handle and `buf` valid for `len` writes.
enum KneStatus kne_model_copy_embeddings(const struct KneModel *model, double *buf, uintptr_t len);

// Writes the center embeddings in word2vec text format.
//
// # Safety
// `model` must be a live handle and `path` a NUL-terminated string.
enum KneStatus kne_model_save(const struct KneModel *model, const char *path);

// # Safety
// `model` must be NULL or a handle not freed before.
void kne_model_free(struct KneModel *model);

// Evaluates `κ(x, y)` for `d`-vectors.
//
// # Safety
// `x` and `y` must point to `d` readable doubles; `out` must be valid.
enum KneStatus kne_kernel_eval(uint32_t kernel,
                               double param,
                               const double *x,
                               const double *y,
                               uintptr_t d,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KNE_H */
