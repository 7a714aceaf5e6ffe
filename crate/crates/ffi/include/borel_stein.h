#ifndef BOREL_STEIN_H
#define BOREL_STEIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Tail side for [`bs_exact_tail`].
 */
typedef enum BsSide {
  BS_SIDE_LOWER = 0,
  BS_SIDE_UPPER = 1,
} BsSide;

/**
 * Result codes.
 */
typedef enum BsStatus {
  BS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BS_STATUS_NULL_POINTER = 1,
  /**
   * An argument is outside its domain (lambda, eps, index, delta, ...).
   */
  BS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The parameters are valid but the bound does not apply (lambda >= 1/2 for qbd2).
   */
  BS_STATUS_OUT_OF_RANGE = 3,
  /**
   * Window overflow, quadrature failure, or a divergent series.
   */
  BS_STATUS_NUMERIC_FAILURE = 4,
  /**
   * The output buffer is too small; the required length was written.
   */
  BS_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * An internal panic was caught at the boundary.
   */
  BS_STATUS_PANIC = 6,
} BsStatus;

/**
 * Opaque finite-window law.
 */
typedef struct BsLaw BsLaw;

/**
 * Opaque Stein coefficient table.
 */
typedef struct BsSteinTable BsSteinTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; empty after a success. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *bs_last_error_message(void);

/**
 * `ln P(Z = j)` for `Z ~ Borel(lambda)`, `j >= 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BsStatus bs_borel_log_pmf(double lambda, uint64_t j, double *out);

/**
 * Borel law on the smallest window with tail mass at most `eps`.
 *
 * # Safety
 * `out` must be valid for writes. The handle written there must be freed with
 * [`bs_law_free`].
 */
enum BsStatus bs_borel_law_new(double lambda, double eps, struct BsLaw **out);

/**
 * Law with `P(start + i) = probs[i]` and mass `tail` above the window.
 *
 * # Safety
 * `probs` must point to `len` readable values and `out` must be valid for writes.
 */
enum BsStatus bs_law_new(uint64_t start,
                         const double *probs,
                         size_t len,
                         double tail,
                         struct BsLaw **out);

/**
 * Releases a law handle. Null is ignored.
 *
 * # Safety
 * `law` must come from this library and not be used afterwards.
 */
void bs_law_free(struct BsLaw *law);

/**
 * First support point, window length and tail mass.
 *
 * # Safety
 * `law` must be a live handle; each out-pointer must be null or valid for writes.
 */
enum BsStatus bs_law_shape(const struct BsLaw *law, uint64_t *start, size_t *len, double *tail);

/**
 * `P(j)`, zero outside the window.
 *
 * # Safety
 * `law` must be a live handle and `out` valid for writes.
 */
enum BsStatus bs_law_prob(const struct BsLaw *law, uint64_t j, double *out);

/**
 * Copies the window probabilities into `buf`. If `cap` is too small nothing is copied,
 * `*written` receives the required length and `BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `buf` must be valid for `cap` writes and `written` valid for one write.
 */
enum BsStatus bs_law_copy_probs(const struct BsLaw *law, double *buf, size_t cap, size_t *written);

/**
 * Rigorous bracket on the total variation distance.
 *
 * # Safety
 * `a` and `b` must be live handles; `lower` and `upper` valid for writes.
 */
enum BsStatus bs_law_tv_distance(const struct BsLaw *a,
                                 const struct BsLaw *b,
                                 double *lower,
                                 double *upper);

/**
 * Law of the independent sum.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` valid for writes.
 */
enum BsStatus bs_law_convolve(const struct BsLaw *a, const struct BsLaw *b, struct BsLaw **out);

/**
 * Size-biased law, `P(W* = j) ∝ j P(W = j)`.
 *
 * # Safety
 * `law` must be a live handle and `out` valid for writes.
 */
enum BsStatus bs_law_size_bias(const struct BsLaw *law, struct BsLaw **out);

/**
 * Stein coefficient table `a[k][m]` for `2 <= k <= m <= size`.
 *
 * # Safety
 * `out` must be valid for writes; free the handle with [`bs_stein_table_free`].
 */
enum BsStatus bs_stein_table_new(double lambda, size_t size, struct BsSteinTable **out);

/**
 * Releases a table handle. Null is ignored.
 *
 * # Safety
 * `table` must come from this library and not be used afterwards.
 */
void bs_stein_table_free(struct BsSteinTable *table);

/**
 * `a[k][m]`; zero for `m < k`.
 *
 * # Safety
 * `table` must be a live handle and `out` valid for writes.
 */
enum BsStatus bs_stein_table_get(const struct BsSteinTable *table, size_t k, size_t m, double *out);

/**
 * Solves the Stein equation for `h` given on `1..=size`, writing `f(1..=size)` to `f_out`.
 *
 * # Safety
 * `h` must point to `len` readable values and `f_out` to `len` writable values, where `len`
 * equals the table size.
 */
enum BsStatus bs_stein_solve(const struct BsSteinTable *table,
                             const double *h,
                             size_t len,
                             double *f_out);

/**
 * `λ² Var(S) / (1-λ)`. `service` is e.g. `"exponential"`, `"gamma:4"`, `"uniform:0.5"` or
 * `"two-point:0.5:0.5"`.
 *
 * # Safety
 * `service` must be a NUL-terminated string and `out` valid for writes.
 */
enum BsStatus bs_queue_bound_qbd1(double lambda, const char *service, double *out);

/**
 * `λ² E[S|S-1|] / (1-2λ)`; `OUT_OF_RANGE` for `λ >= 1/2`.
 *
 * # Safety
 * `service` must be a NUL-terminated string and `out` valid for writes.
 */
enum BsStatus bs_queue_bound_qbd2(double lambda, const char *service, double *out);

/**
 * `exp(-t²/2)`.
 */
double bs_lower_tail_bound(double t);

/**
 * Upper tail bound for a fixed `delta`, with the resulting `gamma` and `K`.
 *
 * # Safety
 * `out` must be valid for writes; `gamma` and `k` may be null.
 */
enum BsStatus bs_upper_tail_bound(double lambda,
                                  double delta,
                                  double t,
                                  double *out,
                                  double *gamma,
                                  double *k);

/**
 * `delta` minimizing the upper tail bound at `t`, and the bound.
 *
 * # Safety
 * Both out-pointers must be valid for writes.
 */
enum BsStatus bs_optimize_delta(double lambda, double t, double *delta_out, double *bound_out);

/**
 * Exact standardized tail, in `[value, value + err]`.
 *
 * # Safety
 * Both out-pointers must be valid for writes.
 */
enum BsStatus bs_exact_tail(double lambda, double t, enum BsSide side, double *value, double *err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOREL_STEIN_H */
