/* SPDX-License-Identifier: Apache-2.0 */
#ifndef TEDJOIN_TEDJOIN_H
#define TEDJOIN_TEDJOIN_H

/*
 * C interface to the tedjoin epsilon self-join engine.
 *
 * Objects are opaque handles created by tedj_*_create/read/generate/join
 * functions and released with the matching *_free function. Every fallible
 * call returns a tedj_status; on failure, tedj_last_error() returns a message
 * describing the most recent error on the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TEDJ_BUILDING_LIBRARY)
#define TEDJ_API __declspec(dllexport)
#else
#define TEDJ_API __declspec(dllimport)
#endif
#else
#define TEDJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tedj_status {
  TEDJ_OK = 0,
  TEDJ_ERR_VALIDATION = 1,
  TEDJ_ERR_BOUNDS = 2,
  TEDJ_ERR_PARSE = 3,
  TEDJ_ERR_IO = 4,
  TEDJ_ERR_RESOURCE = 5,
  TEDJ_ERR_INTERNAL = 6
} tedj_status;

typedef enum tedj_distribution { TEDJ_DIST_UNIFORM = 0, TEDJ_DIST_EXPONENTIAL = 1 } tedj_distribution;
typedef enum tedj_format { TEDJ_FORMAT_CSV = 0, TEDJ_FORMAT_BINARY = 1 } tedj_format;
typedef enum tedj_kernel { TEDJ_KERNEL_TILE = 0, TEDJ_KERNEL_SCALAR = 1 } tedj_kernel;

typedef struct tedj_dataset tedj_dataset;
typedef struct tedj_result tedj_result;

/* batch_size value meaning "a single batch". */
#define TEDJ_UNBOUNDED_BATCH UINT64_MAX

typedef struct tedj_join_config {
  double epsilon;
  int kernel;         /* tedj_kernel */
  int short_circuit;  /* non-zero enables chunk short-circuiting */
  uint64_t k_idx;     /* 0 selects min(d, 6) */
  uint64_t batch_size;
  uint32_t threads;
  int reorder_dims;
  uint64_t max_result_pairs; /* 0 = unlimited */
} tedj_join_config;

typedef struct tedj_join_stats {
  uint64_t cells;
  uint64_t batches;
  uint64_t tiles_processed;
  uint64_t chunks_executed;
  uint64_t chunks_skipped;
  uint64_t candidates_refined;
  uint64_t pairs_emitted;
  double index_seconds;
  double refine_seconds;
  double throughput;
} tedj_join_stats;

TEDJ_API const char* tedj_version(void);
TEDJ_API const char* tedj_last_error(void);
TEDJ_API const char* tedj_status_string(tedj_status status);

/* Datasets. */
TEDJ_API tedj_status tedj_dataset_from_rows(const double* coords, uint64_t n, uint64_t d, tedj_dataset** out);
TEDJ_API tedj_status tedj_dataset_generate(tedj_distribution dist, uint64_t n, uint64_t d, uint64_t seed,
                                           double rate, tedj_dataset** out);
TEDJ_API tedj_status tedj_dataset_read(const char* path, tedj_format format, tedj_dataset** out);
TEDJ_API tedj_status tedj_dataset_write(const tedj_dataset* dataset, const char* path, tedj_format format);
TEDJ_API uint64_t tedj_dataset_size(const tedj_dataset* dataset);
TEDJ_API uint64_t tedj_dataset_dims(const tedj_dataset* dataset);
TEDJ_API uint64_t tedj_dataset_checksum(const tedj_dataset* dataset);
/* Copies point i's logical coordinates into out[0..d). */
TEDJ_API tedj_status tedj_dataset_point(const tedj_dataset* dataset, uint64_t i, double* out);
TEDJ_API void tedj_dataset_free(tedj_dataset* dataset);

/* Joins. */
TEDJ_API void tedj_join_config_init(tedj_join_config* config);
TEDJ_API tedj_status tedj_self_join(const tedj_dataset* dataset, const tedj_join_config* config, tedj_result** out);
/* O(n^2) reference join; n is limited to 50000 unless force is non-zero. */
TEDJ_API tedj_status tedj_brute_force_join(const tedj_dataset* dataset, double epsilon, int force,
                                           tedj_result** out);

/* Results hold pairs sorted by (query, neighbor). */
TEDJ_API uint64_t tedj_result_pair_count(const tedj_result* result);
TEDJ_API tedj_status tedj_result_pair(const tedj_result* result, uint64_t index, uint32_t* query,
                                      uint32_t* neighbor, double* sq_dist);
TEDJ_API double tedj_result_selectivity(const tedj_result* result);
/* Brute-force results report zeroed stats. */
TEDJ_API void tedj_result_stats(const tedj_result* result, tedj_join_stats* out);
/* One "query neighbor sq_dist" line per pair, sq_dist with 17 significant digits. */
TEDJ_API tedj_status tedj_result_write_pairs(const tedj_result* result, const char* path);
/* Removes pair index; used to exercise mismatch reporting. */
TEDJ_API tedj_status tedj_result_remove_pair(tedj_result* result, uint64_t index);
TEDJ_API void tedj_result_free(tedj_result* result);

#ifdef __cplusplus
}
#endif

#endif /* TEDJOIN_TEDJOIN_H */
