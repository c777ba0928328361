/* C interface for the predictive information bottleneck laboratory. */

#ifndef PIB_H
#define PIB_H

/* Generated by cbindgen; edit src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum PibStatus {
  PibStatus_Ok = 0,
  PibStatus_NullPointer = 1,
  PibStatus_InvalidArgument = 2,
  PibStatus_InvalidDistribution = 3,
  PibStatus_SizeCapExceeded = 4,
  PibStatus_BetaOutOfRange = 5,
  PibStatus_SupportViolation = 6,
  PibStatus_NumericalFailure = 7,
  PibStatus_Panic = 8,
} PibStatus;

/**
 * Opaque exact-joint handle.
 */
typedef struct PibJointModel PibJointModel;

/**
 * Opaque world handle.
 */
typedef struct PibWorld PibWorld;

/**
 * Solver settings for [`pib_curve`] and [`pib_solve`]. Zeroed fields fall
 * back to the defaults (k_theta 2, restarts 8, max_iters 10000, tol 1e-10).
 */
typedef struct PibSolverOptions {
  size_t k_theta;
  size_t restarts;
  size_t max_iters;
  double tol;
  uint64_t seed;
} PibSolverOptions;

/**
 * One solved β grid point.
 */
typedef struct PibCurveRecord {
  double beta;
  double mi_theta_past;
  double mi_theta_future;
  double cmi_theta_past_given_future;
  double exact_objective;
  double variational_objective;
  uint64_t restarts_used;
  uint64_t iterations;
} PibCurveRecord;

/**
 * Tempered Beta posterior parameters and log-partition value.
 */
typedef struct PibBetaPosterior {
  double a;
  double b;
  double log_partition;
} PibBetaPosterior;

/**
 * Tempered Gaussian posterior parameters and log-partition value.
 */
typedef struct PibGaussianPosterior {
  double mean;
  double var;
  double log_partition;
} PibGaussianPosterior;

/**
 * Result of a Gibbs variational optimization.
 */
typedef struct PibGibbsResult {
  double mean;
  double log_std;
  double objective;
  uint64_t iterations;
  bool converged;
} PibGibbsResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Detail message for the most recent failure on this thread, or null.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *pib_last_error_message(void);

/**
 * Library version as a static, NUL-terminated string.
 */
const char *pib_version(void);

/**
 * Builds a world from a cause prior of length `k_phi` and a row-major
 * `k_phi × k_x` observation table.
 *
 * # Safety
 * `phi_prior` must point to `k_phi` doubles, `obs_given_phi` to
 * `k_phi * k_x` doubles, and `out` must be a valid destination pointer.
 */
enum PibStatus pib_world_new(const double *phi_prior,
                             size_t k_phi,
                             const double *obs_given_phi,
                             size_t k_x,
                             struct PibWorld **out);

/**
 * Looks up a built-in world ("w1" or "w2") by NUL-terminated name.
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid
 * destination pointer.
 */
enum PibStatus pib_world_builtin(const char *name, struct PibWorld **out);

/**
 * Releases a world handle. Null is a no-op.
 *
 * # Safety
 * `world` must have come from `pib_world_new`/`pib_world_builtin` and not
 * have been freed already.
 */
void pib_world_free(struct PibWorld *world);

/**
 * Materializes the exact joint table for `n_past` past and `n_future`
 * future draws.
 *
 * # Safety
 * `world` must be a live world handle and `out` a valid destination.
 */
enum PibStatus pib_joint_new(const struct PibWorld *world,
                             size_t n_past,
                             size_t n_future,
                             struct PibJointModel **out);

/**
 * Releases a joint handle. Null is a no-op.
 *
 * # Safety
 * `joint` must have come from `pib_joint_new` and not have been freed.
 */
void pib_joint_free(struct PibJointModel *joint);

/**
 * I(X_P; X_F) of the joint, in nats.
 *
 * # Safety
 * `joint` must be a live joint handle and `out` a valid destination.
 */
enum PibStatus pib_predictive_information(const struct PibJointModel *joint, double *out);

/**
 * Traces the information curve over a strictly increasing β grid in
 * [0, 1), writing one record per grid point into `out_records`.
 *
 * # Safety
 * `joint` must be a live joint handle, `betas` must point to `n_betas`
 * doubles, and `out_records` to space for `n_betas` records.
 */
enum PibStatus pib_curve(const struct PibJointModel *joint,
                         const double *betas,
                         size_t n_betas,
                         struct PibSolverOptions options,
                         struct PibCurveRecord *out_records);

/**
 * Solves a single β and reports the channel's informations plus the exact
 * and variational objectives (the latter at the optimal tables).
 *
 * # Safety
 * `joint` must be a live joint handle and `out_record` a valid
 * destination pointer.
 */
enum PibStatus pib_solve(const struct PibJointModel *joint,
                         double beta,
                         struct PibSolverOptions options,
                         struct PibCurveRecord *out_record);

/**
 * Beta–Bernoulli tempered update.
 *
 * # Safety
 * `out` must be a valid destination pointer.
 */
enum PibStatus pib_beta_bernoulli_power(double prior_a,
                                        double prior_b,
                                        uint64_t successes,
                                        uint64_t trials,
                                        double beta,
                                        struct PibBetaPosterior *out);

/**
 * Gaussian-mean tempered update on `n` observations.
 *
 * # Safety
 * `data` must point to `n` doubles (may be null when `n` is 0) and `out`
 * must be a valid destination.
 */
enum PibStatus pib_gaussian_power(double prior_mean,
                                  double prior_var,
                                  double obs_var,
                                  const double *data,
                                  size_t n,
                                  double beta,
                                  struct PibGaussianPosterior *out);

/**
 * Dirichlet–categorical tempered update over `k` categories; posterior
 * concentrations are written to `out_alphas`.
 *
 * # Safety
 * `prior_alphas` and `counts` must point to `k` entries each, `out_alphas`
 * to space for `k` doubles, and `out_log_partition` must be valid.
 */
enum PibStatus pib_dirichlet_power(const double *prior_alphas,
                                   const uint64_t *counts,
                                   size_t k,
                                   double beta,
                                   double *out_alphas,
                                   double *out_log_partition);

/**
 * Minimizes the Gaussian Gibbs functional by fixed-step gradient descent.
 *
 * # Safety
 * `data` must point to `n` doubles (may be null when `n` is 0) and `out`
 * must be a valid destination.
 */
enum PibStatus pib_gibbs_optimize(double prior_mean,
                                  double prior_var,
                                  double obs_var,
                                  const double *data,
                                  size_t n,
                                  double beta,
                                  double init_mean,
                                  double init_log_std,
                                  double step_size,
                                  size_t max_iters,
                                  double tol,
                                  struct PibGibbsResult *out);

/**
 * The closed-form centered-augmentation gap −noise_std²/(2·obs_var).
 *
 * # Safety
 * `out` must be a valid destination pointer.
 */
enum PibStatus pib_augmentation_gap(double noise_std, double obs_var, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PIB_H */
