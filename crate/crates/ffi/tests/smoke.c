#include <math.h>
#include <stdio.h>
#include "infobounds.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    const double w1[] = {0.25, 0.75}, w2[] = {3.0, 1.0};
    IbDistribution *p1 = NULL, *p2 = NULL;
    CHECK(ib_distribution_new(w1, 2, &p1) == IB_STATUS_OK);
    CHECK(ib_distribution_new(w2, 2, &p2) == IB_STATUS_OK);

    IbChernoff c;
    CHECK(ib_chernoff(p1, p2, 1e-10, &c) == IB_STATUS_OK);
    CHECK(fabs(c.lambda_star - 0.5) < 1e-9);
    CHECK(fabs(c.c_info - 0.207519) < 1e-6);

    const double zeros[] = {0.0, 0.0};
    IbDistribution *bad = NULL;
    CHECK(ib_distribution_new(zeros, 2, &bad) == IB_STATUS_INVALID);
    CHECK(bad == NULL);
    CHECK(ib_last_error_message() != NULL);

    const double levels[] = {0.0, 1.0};
    double beta = 0.0;
    CHECK(ib_solve_beta(levels, 2, 0.9, 1e-10, &beta) == IB_STATUS_INFEASIBLE);

    CHECK(fabs(ib_q_function(0.0) - 0.5) < 1e-15);
    ib_distribution_free(p1);
    ib_distribution_free(p2);
    puts("ok");
    return 0;
}
