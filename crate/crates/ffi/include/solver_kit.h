#ifndef SOLVER_KIT_H
#define SOLVER_KIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NULL_POINTER = 1,
  SK_STATUS_INVALID_ARGUMENT = 2,
  SK_STATUS_PARSE_ERROR = 3,
  SK_STATUS_IO_ERROR = 4,
  SK_STATUS_MATRIX_ERROR = 5,
  SK_STATUS_PRECOND_ERROR = 6,
  SK_STATUS_BREAKDOWN = 7,
  /**
   * The solve ran out of iterations; outputs are still filled in.
   */
  SK_STATUS_NOT_CONVERGED = 8,
  SK_STATUS_MODEL_ERROR = 9,
  SK_STATUS_PANIC = 10,
} SkStatus;

typedef enum SkPrecond {
  SK_PRECOND_NONE = 0,
  SK_PRECOND_JACOBI = 1,
  SK_PRECOND_ILU0 = 2,
} SkPrecond;

typedef enum SkReorder {
  SK_REORDER_NONE = 0,
  SK_REORDER_LEVEL_SCHEDULING = 1,
  SK_REORDER_GRAPH_COLORING = 2,
} SkReorder;

/**
 * Opaque matrix handle.
 */
typedef struct SkMatrix SkMatrix;

typedef struct SkSolverConfig {
  uint64_t max_iterations;
  /**
   * Relative residual reduction in (0, 1).
   */
  double reduction;
  enum SkPrecond precond;
  enum SkReorder reorder;
  /**
   * Graph coloring seed.
   */
  uint64_t seed;
} SkSolverConfig;

typedef struct SkSolveSummary {
  bool converged;
  double iterations;
  double initial_residual_norm;
  double final_residual_norm;
  double setup_time_ms;
  double wall_time_ms;
  /**
   * 0 when no reordering was used.
   */
  uint64_t n_colors;
} SkSolveSummary;

typedef struct SkPerfConfig {
  uint32_t n_multipliers;
  double ext_bandwidth_gbps;
  uint32_t n_internal_ports;
  uint32_t fp_add_latency_cycles;
  uint32_t fp_mul_latency_cycles;
  double clock_mhz;
  uint32_t value_width_bytes;
  uint32_t setup_cycles;
  uint32_t write_overhead_cycles;
  uint32_t ilu0_unit_delay_cycles;
} SkPerfConfig;

typedef struct SkPerfSummary {
  uint64_t total_cycles;
  uint64_t spmv_cycles;
  uint64_t ilu0_cycles;
  uint64_t vector_op_cycles;
  double wall_time_ms;
  double gflops;
} SkPerfSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next `sk_` call on the same thread.
 */
const char *sk_last_error_message(void);

/**
 * Static, NUL-terminated library version.
 */
const char *sk_version(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SkStatus sk_matrix_from_matrix_market(const char *path, struct SkMatrix **out);

/**
 * Loads a Matrix Market or CSRO file, detected from its content.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SkStatus sk_matrix_load(const char *path, struct SkMatrix **out);

/**
 * Copies canonical CSR arrays into a new matrix. `row_pointers` holds
 * `n_rows + 1` entries; `col_indices` and `values` hold `nnz`.
 *
 * # Safety
 * Each pointer must reference at least the stated number of elements.
 */
enum SkStatus sk_matrix_from_csr(size_t n_rows,
                                 size_t n_cols,
                                 const size_t *row_pointers,
                                 const size_t *col_indices,
                                 const double *values,
                                 size_t nnz,
                                 struct SkMatrix **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SkStatus sk_matrix_read_csro(const char *path, struct SkMatrix **out);

/**
 * # Safety
 * `m` must be a live handle and `path` a NUL-terminated string.
 */
enum SkStatus sk_matrix_write_csro(const struct SkMatrix *m, const char *path);

/**
 * Any of the output pointers may be NULL.
 *
 * # Safety
 * `m` must be a live handle; non-NULL outputs must be valid.
 */
enum SkStatus sk_matrix_dims(const struct SkMatrix *m, size_t *n_rows, size_t *n_cols, size_t *nnz);

/**
 * Frees a handle. NULL is ignored.
 *
 * # Safety
 * `m` must be NULL or a handle not yet freed.
 */
void sk_matrix_free(struct SkMatrix *m);

/**
 * `y = A x`
 *
 * # Safety
 * `x` and `y` must reference `x_len` and `y_len` elements.
 */
enum SkStatus sk_spmv(const struct SkMatrix *m,
                      const double *x,
                      size_t x_len,
                      double *y,
                      size_t y_len);

struct SkSolverConfig sk_solver_config_default(void);

/**
 * Solves `A x = b`. `x0` may be NULL for a zero start. On success or
 * `NotConverged`, `x` holds the last iterate and `summary` (if non-NULL)
 * is filled in.
 *
 * # Safety
 * `b`, `x` and a non-NULL `x0` must reference `n` elements.
 */
enum SkStatus sk_solve(const struct SkMatrix *m,
                       const double *b,
                       const double *x0,
                       double *x,
                       size_t n,
                       const struct SkSolverConfig *config,
                       struct SkSolveSummary *summary);

struct SkPerfConfig sk_perf_config_default(void);

/**
 * Models an ILU0-BiCGStab run of `iterations` on `m` after reordering.
 * With `SkReorder::None` the matrix is a single color.
 *
 * # Safety
 * `m` must be a live handle; `config` and `out` must be valid.
 */
enum SkStatus sk_model_solver(const struct SkMatrix *m,
                              enum SkReorder reorder,
                              uint64_t seed,
                              const struct SkPerfConfig *config,
                              double iterations,
                              struct SkPerfSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOLVER_KIT_H */
