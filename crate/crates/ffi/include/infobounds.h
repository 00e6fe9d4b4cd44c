#ifndef INFOBOUNDS_H
#define INFOBOUNDS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum IbStatus {
  IB_STATUS_OK = 0,
  IB_STATUS_NULL_POINTER = 1,
  /**
   * Invalid input, mismatched alphabets or a degenerate hypothesis.
   */
  IB_STATUS_INVALID = 2,
  /**
   * A constraint has no solution.
   */
  IB_STATUS_INFEASIBLE = 3,
  /**
   * Enumeration cap or integer range exceeded.
   */
  IB_STATUS_RESOURCE = 4,
  IB_STATUS_NUMERICAL = 5,
  IB_STATUS_PANIC = 6,
} IbStatus;

typedef enum IbConstraintMode {
  IB_CONSTRAINT_MODE_AT_LEAST = 0,
  IB_CONSTRAINT_MODE_AT_MOST = 1,
} IbConstraintMode;

/**
 * Opaque probability distribution.
 */
typedef struct IbDistribution IbDistribution;

typedef struct IbChernoff {
  double lambda_star;
  /**
   * Bits.
   */
  double c_info;
  double d1;
  double d2;
  uint64_t iterations;
} IbChernoff;

typedef struct IbStein {
  double alpha_n;
  double log2_beta_n;
  /**
   * `-(1/n) log2 beta_n`, bits.
   */
  double exponent;
  double divergence;
} IbStein;

typedef struct IbSanov {
  /**
   * Bits.
   */
  double d_star;
  double log2_prob;
  double log2_lower;
  double log2_upper;
} IbSanov;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *ib_last_error_message(void);

/**
 * Normalizes `len` nonnegative weights into a new distribution.
 */
enum IbStatus ib_distribution_new(const double *weights,
                                  size_t len,
                                  struct IbDistribution **out_dist);

/**
 * Releases a handle; NULL is ignored.
 */
void ib_distribution_free(struct IbDistribution *dist);

/**
 * Alphabet size; 0 for NULL.
 */
size_t ib_distribution_len(const struct IbDistribution *dist);

/**
 * Copies the probabilities into `out_probs`, which must hold `len` entries.
 */
enum IbStatus ib_distribution_probs(const struct IbDistribution *dist,
                                    double *out_probs,
                                    size_t len);

/**
 * Shannon entropy in bits.
 */
enum IbStatus ib_entropy(const struct IbDistribution *dist, double *out_bits);

/**
 * `D(p || q)` in bits; `INFINITY` when `p` is not absolutely continuous
 * with respect to `q`.
 */
enum IbStatus ib_kl_divergence(const struct IbDistribution *p,
                               const struct IbDistribution *q,
                               double *out_bits);

/**
 * Member `p1^lambda p2^(1-lambda) / Z` of the tilted family.
 */
enum IbStatus ib_tilted(const struct IbDistribution *p1,
                        const struct IbDistribution *p2,
                        double lambda,
                        struct IbDistribution **out_dist);

/**
 * Chernoff information and the equalizing tilt.
 */
enum IbStatus ib_chernoff(const struct IbDistribution *p1,
                          const struct IbDistribution *p2,
                          double tol,
                          struct IbChernoff *out_report);

/**
 * `log2` of the minimal type-II error at type-I level `epsilon`.
 */
enum IbStatus ib_neyman_pearson_log2_beta(const struct IbDistribution *p1,
                                          const struct IbDistribution *p2,
                                          uint64_t n,
                                          double epsilon,
                                          double *out_log2_beta);

/**
 * Exact errors of the Stein acceptance region with band half-width `delta`.
 */
enum IbStatus ib_stein(const struct IbDistribution *p1,
                       const struct IbDistribution *p2,
                       uint64_t n,
                       double delta,
                       struct IbStein *out_report);

/**
 * Exact probability that the empirical frequency of `symbol` is at least
 * (or at most) `threshold`, with its type-counting bracket.
 */
enum IbStatus ib_sanov(const struct IbDistribution *p,
                       enum IbConstraintMode mode,
                       size_t symbol,
                       double threshold,
                       uint64_t n,
                       struct IbSanov *out_report);

/**
 * Number of n-types over `k` symbols.
 */
enum IbStatus ib_count_types(uint64_t n, size_t k, uint64_t *out_count);

/**
 * Standard normal tail `P(Z > x)`.
 */
double ib_q_function(double x);

/**
 * Boltzmann probabilities for `len` levels at inverse temperature `beta`,
 * written to `out_probs` (`len` entries).
 */
enum IbStatus ib_boltzmann(const double *levels, size_t len, double beta, double *out_probs);

/**
 * Inverse temperature reproducing `target_mean`.
 */
enum IbStatus ib_solve_beta(const double *levels,
                            size_t len,
                            double target_mean,
                            double tol,
                            double *out_beta);

/**
 * Monte Carlo error rate of the minimum-distance detector.
 */
enum IbStatus ib_simulate_detection(uint64_t dim,
                                    double amplitude,
                                    uint64_t trials,
                                    uint64_t seed,
                                    double *out_rate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFOBOUNDS_H */
