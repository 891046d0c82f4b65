#ifndef ISING_WRC_H
#define ISING_WRC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Chains runnable through [`iw_run_chain`].
 */
typedef enum IwChain {
  IW_CHAIN_EF_WRC = 0,
  IW_CHAIN_EF_SG = 1,
  IW_CHAIN_SW_ISING = 2,
  IW_CHAIN_SW_WRC = 3,
  IW_CHAIN_SINGLE_BOND = 4,
} IwChain;

/**
 * Status codes. Zero is success.
 */
typedef enum IwStatus {
  IW_STATUS_OK = 0,
  IW_STATUS_NULL_POINTER = 1,
  IW_STATUS_INVALID_ARGUMENT = 2,
  IW_STATUS_PARSE = 3,
  IW_STATUS_CAP_EXCEEDED = 4,
  IW_STATUS_NON_COALESCENCE = 5,
  IW_STATUS_IO = 6,
  IW_STATUS_BUFFER_TOO_SMALL = 7,
  IW_STATUS_INTERNAL = 8,
  IW_STATUS_PANIC = 9,
} IwStatus;

/**
 * Opaque graph handle.
 */
typedef struct IwGraph IwGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t iw_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *iw_version(void);

/**
 * Parse a graph in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum IwStatus iw_graph_parse(const char *text, struct IwGraph **out);

/**
 * Build a graph from arrays: `edges` holds `2 * m` endpoints, `lambda` has
 * `n` entries in `(0, 1]` and `beta` has `m` entries `> 1`.
 *
 * # Safety
 * Arrays must have the stated lengths; `out` must be writable.
 */
enum IwStatus iw_graph_new(size_t n,
                           size_t m,
                           const uint32_t *edges,
                           const double *lambda,
                           const double *beta,
                           struct IwGraph **out);

/**
 * `width × height` grid with uniform parameters.
 *
 * # Safety
 * `out` must be writable.
 */
enum IwStatus iw_graph_grid(size_t width,
                            size_t height,
                            double beta,
                            double lambda,
                            struct IwGraph **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void iw_graph_free(struct IwGraph *g);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t iw_graph_vertex_count(const struct IwGraph *g);

/**
 * Edge count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t iw_graph_edge_count(const struct IwGraph *g);

/**
 * `ln Z_Ising` by enumeration over at most `cap` configurations
 * (`cap == 0` uses the library default).
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_log_partition_function(const struct IwGraph *g, uint64_t cap, double *out);

/**
 * Perfect sample from the Ising distribution. Writes one 0/1 byte per
 * vertex into `spins` and the coalescence time into `coalescence_time`
 * (may be null). `max_steps == 0` uses the default abort threshold.
 *
 * # Safety
 * `g` must be a live handle; `spins` must hold `len` bytes.
 */
enum IwStatus iw_perfect_ising_sample(const struct IwGraph *g,
                                      uint64_t seed,
                                      uint64_t max_steps,
                                      uint8_t *spins,
                                      size_t len,
                                      uint64_t *coalescence_time);

/**
 * Perfect sample from the weighted random-cluster distribution of the
 * Ising instance. Writes one 0/1 byte per edge.
 *
 * # Safety
 * `g` must be a live handle; `edges` must hold `len` bytes.
 */
enum IwStatus iw_perfect_wrc_sample(const struct IwGraph *g,
                                    uint64_t seed,
                                    uint64_t max_steps,
                                    uint8_t *edges,
                                    size_t len,
                                    uint64_t *coalescence_time);

/**
 * Run `steps` steps of a chain from the all-zero state. Spin chains write
 * `n` bytes into `state`, edge chains `m` bytes.
 *
 * # Safety
 * `g` must be a live handle; `state` must hold `len` bytes.
 */
enum IwStatus iw_run_chain(const struct IwGraph *g,
                           enum IwChain chain,
                           uint64_t seed,
                           uint64_t steps,
                           uint8_t *state,
                           size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISING_WRC_H */
