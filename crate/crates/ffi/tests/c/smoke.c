#include <math.h>
#include <stdio.h>
#include "eventgd.h"

static double half_square(const double *theta, size_t n, void *user) {
    (void)user;
    double s = 0.0;
    for (size_t i = 0; i < n; i++) s += 0.5 * theta[i] * theta[i];
    return s;
}

static void identity(const double *theta, size_t n, double *out, void *user) {
    (void)user;
    for (size_t i = 0; i < n; i++) out[i] = theta[i];
}

int main(void) {
    EgdProblem *p = NULL;
    if (egd_callback_problem_new(2, half_square, identity, NULL, &p) != EGD_STATUS_OK) return 1;
    double theta0[2] = {3.0, -4.0};
    EgdSolverParams params = egd_solver_params_default();
    params.epsilon = 1e-8;
    EgdReport *r = NULL;
    if (egd_solve_event_driven(p, theta0, 2, &params, &r) != EGD_STATUS_OK) return 2;
    if (egd_report_termination(r) != EGD_TERMINATION_GRADIENT_TOLERANCE) return 3;
    if (egd_report_objective_evals(r) != egd_report_iterations(r) + 1) return 4;
    egd_report_free(r);
    egd_problem_free(p);

    if (egd_ql_problem_new(EGD_VARIANCE_V1, 0, 10, 0, 1, &p) != EGD_STATUS_INVALID_ARGUMENT) return 5;
    if (egd_last_error_message()[0] == '\0') return 6;

    double v = 0.0, d = 0.0;
    if (egd_frankenstein_eval(2.0, 1.0, 1.0, 2.0, &v, &d) != EGD_STATUS_OK) return 7;
    if (fabs(v - 1.0) > 1e-12 || d != -1.0) return 8;
    printf("ok\n");
    return 0;
}
