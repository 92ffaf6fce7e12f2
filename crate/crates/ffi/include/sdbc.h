#ifndef SDBC_H
#define SDBC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SdbcStatus {
  SDBC_STATUS_OK = 0,
  SDBC_STATUS_NULL_POINTER = 1,
  SDBC_STATUS_INVALID_ARGUMENT = 2,
  SDBC_STATUS_INVALID_MODEL = 3,
  SDBC_STATUS_PARSE = 4,
  SDBC_STATUS_UNSUPPORTED = 5,
  SDBC_STATUS_NUMERICAL = 6,
  SDBC_STATUS_BUFFER_TOO_SMALL = 7,
  SDBC_STATUS_PANIC = 8,
  SDBC_STATUS_OTHER = 9,
} SdbcStatus;

/**
 * A pairwise model under construction or loaded from text.
 */
typedef struct SdbcModel SdbcModel;

/**
 * The outcome of a solve.
 */
typedef struct SdbcResult SdbcResult;

/**
 * Solver options. Initialise with [`sdbc_options_default`].
 */
typedef struct SdbcOptions {
  /**
   * Wall-clock budget in seconds; negative means no limit.
   */
  double budget_sec;
  /**
   * Non-zero restricts bounding to the base constraints.
   */
  int32_t no_cuts;
  uint64_t seed;
  double gamma0_scale;
  double delta;
} SdbcOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *sdbc_last_error(void);

/**
 * Model with `n` nodes, `labels[p]` states each and all potentials zero.
 *
 * # Safety
 * `labels` must point to `n` values; `out` must be writable.
 */
enum SdbcStatus sdbc_model_new(const size_t *labels, size_t n, struct SdbcModel **out);

/**
 * Parses UAI `MARKOV` text. Non-zero `raw_energy` reads tables as energies.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SdbcStatus sdbc_model_from_uai(const char *text, int32_t raw_energy, struct SdbcModel **out);

/**
 * Synthetic model with Gaussian potentials.
 *
 * # Safety
 * `out` must be writable.
 */
enum SdbcStatus sdbc_model_generate(size_t n,
                                    size_t h,
                                    double kappa,
                                    double omega,
                                    uint64_t seed,
                                    struct SdbcModel **out);

/**
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void sdbc_model_free(struct SdbcModel *model);

/**
 * # Safety
 * `model` must be a valid handle or null.
 */
size_t sdbc_model_num_nodes(const struct SdbcModel *model);

/**
 * # Safety
 * `model` must be a valid handle or null.
 */
size_t sdbc_model_num_edges(const struct SdbcModel *model);

/**
 * Replaces the unary energies of node `p`.
 *
 * # Safety
 * `model` must be a valid handle; `values` must point to `len` values.
 */
enum SdbcStatus sdbc_model_set_unary(struct SdbcModel *model,
                                     size_t p,
                                     const double *values,
                                     size_t len);

/**
 * Adds edge `(p, q)` with a row-major `labels[p] x labels[q]` energy table.
 *
 * # Safety
 * `model` must be a valid handle; `table` must point to `len` values.
 */
enum SdbcStatus sdbc_model_add_edge(struct SdbcModel *model,
                                    size_t p,
                                    size_t q,
                                    const double *table,
                                    size_t len);

/**
 * Energy of the assignment `x`.
 *
 * # Safety
 * `model` must be a valid handle; `x` must point to `len` labels; `out` must
 * be writable.
 */
enum SdbcStatus sdbc_model_energy(const struct SdbcModel *model,
                                  const size_t *x,
                                  size_t len,
                                  double *out);

struct SdbcOptions sdbc_options_default(void);

/**
 * Runs branch-and-bound. `options` may be null for defaults.
 *
 * # Safety
 * `model` must be a valid handle; `options` valid or null; `out` writable.
 */
enum SdbcStatus sdbc_solve(const struct SdbcModel *model,
                           const struct SdbcOptions *options,
                           struct SdbcResult **out);

/**
 * # Safety
 * `result` must come from this library and not be used afterwards.
 */
void sdbc_result_free(struct SdbcResult *result);

/**
 * Incumbent energy; `+inf` when no assignment was found.
 *
 * # Safety
 * `result` must be a valid handle or null.
 */
double sdbc_result_upper_bound(const struct SdbcResult *result);

/**
 * Certified lower bound on the optimum.
 *
 * # Safety
 * `result` must be a valid handle or null.
 */
double sdbc_result_lower_bound(const struct SdbcResult *result);

/**
 * 1 if the incumbent is certified optimal, else 0.
 *
 * # Safety
 * `result` must be a valid handle or null.
 */
int32_t sdbc_result_exact(const struct SdbcResult *result);

/**
 * 1 if the budget ran out, else 0.
 *
 * # Safety
 * `result` must be a valid handle or null.
 */
int32_t sdbc_result_timed_out(const struct SdbcResult *result);

/**
 * Number of bounded nodes.
 *
 * # Safety
 * `result` must be a valid handle or null.
 */
size_t sdbc_result_nodes(const struct SdbcResult *result);

/**
 * Copies the incumbent into `buf`. `written` receives the node count, also
 * when the buffer is too small.
 *
 * # Safety
 * `result` must be a valid handle; `buf` must hold `cap` values; `written`
 * must be writable.
 */
enum SdbcStatus sdbc_result_assignment(const struct SdbcResult *result,
                                       size_t *buf,
                                       size_t cap,
                                       size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDBC_H */
