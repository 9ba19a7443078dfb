#ifndef EVENTGD_H
#define EVENTGD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EgdStatus {
  EGD_STATUS_OK = 0,
  EGD_STATUS_NULL_POINTER = 1,
  EGD_STATUS_INVALID_ARGUMENT = 2,
  EGD_STATUS_DIMENSION_MISMATCH = 3,
  EGD_STATUS_NUMERICAL = 4,
  EGD_STATUS_UNSUPPORTED = 5,
  EGD_STATUS_PANIC = 6,
} EgdStatus;

typedef enum EgdVariance {
  EGD_VARIANCE_V1 = 1,
  EGD_VARIANCE_V2 = 2,
  EGD_VARIANCE_V3 = 3,
  EGD_VARIANCE_V4 = 4,
} EgdVariance;

typedef enum EgdMethod {
  EGD_METHOD_FIXED = 0,
  EGD_METHOD_DIMINISHING = 1,
  EGD_METHOD_BB_LONG = 2,
  EGD_METHOD_BB_SHORT = 3,
  EGD_METHOD_LIPSCHITZ_APPROX = 4,
  EGD_METHOD_NESTEROV = 5,
  EGD_METHOD_WNGRAD = 6,
} EgdMethod;

typedef enum EgdTermination {
  EGD_TERMINATION_GRADIENT_TOLERANCE = 0,
  EGD_TERMINATION_ITERATION_BUDGET = 1,
  EGD_TERMINATION_NON_FINITE = 2,
} EgdTermination;

/**
 * Opaque problem handle.
 */
typedef struct EgdProblem EgdProblem;

/**
 * Opaque solve-report handle.
 */
typedef struct EgdReport EgdReport;

/**
 * Event-driven solver settings. `step_budget == 0` means no global budget.
 */
typedef struct EgdSolverParams {
  double epsilon;
  double rho;
  double delta_bar;
  double delta0;
  double radius;
  size_t max_inner;
  size_t outer_budget;
  size_t step_budget;
} EgdSolverParams;

/**
 * Objective callback: `theta` has `n` entries.
 */
typedef double (*EgdObjectiveFn)(const double *theta, size_t n, void *user);

/**
 * Gradient callback: writes `n` entries to `grad_out`.
 */
typedef void (*EgdGradientFn)(const double *theta, size_t n, double *grad_out, void *user);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *egd_last_error_message(void);

struct EgdSolverParams egd_solver_params_default(void);

/**
 * Generates a seeded quasi-likelihood dataset with `num_starts` starting
 * points and wraps it as a problem of dimension `n`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum EgdStatus egd_ql_problem_new(enum EgdVariance variance,
                                  size_t n,
                                  size_t m,
                                  uint64_t seed,
                                  size_t num_starts,
                                  struct EgdProblem **out);

/**
 * Copies starting point `index` of a quasi-likelihood problem into `buf`.
 *
 * # Safety
 * `problem` must be a live handle and `buf` must hold `len` doubles.
 */
enum EgdStatus egd_ql_problem_start(const struct EgdProblem *problem,
                                    size_t index,
                                    double *buf,
                                    size_t len);

/**
 * Wraps caller-supplied callbacks. `user` is passed through untouched and
 * must outlive the handle.
 *
 * # Safety
 * The callbacks must read exactly `n` doubles from `theta` (and write `n` to
 * `grad_out`) and must not unwind. `out` must be writable.
 */
enum EgdStatus egd_callback_problem_new(size_t n,
                                        EgdObjectiveFn objective,
                                        EgdGradientFn gradient,
                                        void *user,
                                        struct EgdProblem **out);

/**
 * The one-dimensional objective on which `method` with step `step` diverges.
 *
 * # Safety
 * `out` must be writable.
 */
enum EgdStatus egd_divergence_problem_new(enum EgdMethod method,
                                          double step,
                                          struct EgdProblem **out);

/**
 * Dimension of a problem, or 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t egd_problem_dimension(const struct EgdProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle, `theta` must hold `n` doubles and `value`
 * must be writable.
 */
enum EgdStatus egd_problem_objective(const struct EgdProblem *problem,
                                     const double *theta,
                                     size_t n,
                                     double *value);

/**
 * # Safety
 * `problem` must be a live handle; `theta` and `grad_out` must hold `n` doubles.
 */
enum EgdStatus egd_problem_gradient(const struct EgdProblem *problem,
                                    const double *theta,
                                    size_t n,
                                    double *grad_out);

/**
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void egd_problem_free(struct EgdProblem *problem);

/**
 * Runs event-driven gradient descent. `params` may be null for defaults.
 *
 * # Safety
 * `problem` must be a live handle, `theta0` must hold `n` doubles, `params`
 * must be null or valid and `out` writable.
 */
enum EgdStatus egd_solve_event_driven(const struct EgdProblem *problem,
                                      const double *theta0,
                                      size_t n,
                                      const struct EgdSolverParams *params,
                                      struct EgdReport **out);

/**
 * Runs an objective-function-free baseline for at most `budget` updates.
 *
 * # Safety
 * As for [`egd_solve_event_driven`].
 */
enum EgdStatus egd_solve_baseline(const struct EgdProblem *problem,
                                  enum EgdMethod method,
                                  double step,
                                  size_t budget,
                                  double grad_tol,
                                  const double *theta0,
                                  size_t n,
                                  struct EgdReport **out);

/**
 * Final iterate length, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t egd_report_dimension(const struct EgdReport *report);

/**
 * # Safety
 * `report` must be a live handle and `buf` must hold `len` doubles.
 */
enum EgdStatus egd_report_iterate(const struct EgdReport *report, double *buf, size_t len);

/**
 * Final objective value; NaN when the solver never evaluated it (baselines).
 *
 * # Safety
 * `report` must be a live handle.
 */
double egd_report_objective(const struct EgdReport *report);

/**
 * # Safety
 * `report` must be a live handle.
 */
double egd_report_grad_norm(const struct EgdReport *report);

/**
 * Outer iterations (event-driven) or updates (baselines).
 *
 * # Safety
 * `report` must be a live handle.
 */
size_t egd_report_iterations(const struct EgdReport *report);

/**
 * # Safety
 * `report` must be a live handle.
 */
size_t egd_report_gradient_steps(const struct EgdReport *report);

/**
 * # Safety
 * `report` must be a live handle.
 */
uint64_t egd_report_objective_evals(const struct EgdReport *report);

/**
 * # Safety
 * `report` must be a live handle.
 */
uint64_t egd_report_gradient_evals(const struct EgdReport *report);

/**
 * # Safety
 * `report` must be a live handle.
 */
enum EgdTermination egd_report_termination(const struct EgdReport *report);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void egd_report_free(struct EgdReport *report);

/**
 * Value and right derivative of one Frankenstein segment at `theta` in
 * `[0, m]`. Either output pointer may be null.
 *
 * # Safety
 * Non-null output pointers must be writable.
 */
enum EgdStatus egd_frankenstein_eval(double m,
                                     double d,
                                     double delta,
                                     double theta,
                                     double *value,
                                     double *derivative);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVENTGD_H */
