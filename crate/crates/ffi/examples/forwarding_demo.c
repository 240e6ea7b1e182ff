/* Minimal C consumer of the fwdgame C ABI: equilibrium threshold, a
 * replicator trajectory, and a small simulation run. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "fwdgame.h"

static void check(FgStatus status, const char *what) {
    if (status != FG_STATUS_OK) {
        fprintf(stderr, "%s failed: %s\n", what, fg_status_name(status));
        exit(1);
    }
}

int main(void) {
    FgParams *params = NULL;
    check(fg_params_new(3.0, 3.0, 3.0, 1.0, &params), "fg_params_new");

    double threshold = 0.0;
    check(fg_threshold_share(params, &threshold), "fg_threshold_share");
    if (fabs(threshold - 0.1) > 1e-15) {
        fprintf(stderr, "unexpected threshold %f\n", threshold);
        return 1;
    }

    double s_d = 0.0, s_h = 1.0;
    check(fg_optimal_strategy(params, 0.0, &s_d, &s_h), "fg_optimal_strategy");
    if (s_d != 1.0 || fabs(s_h - 0.25) > 1e-12) {
        fprintf(stderr, "unexpected strategy (%f, %f)\n", s_d, s_h);
        return 1;
    }

    FgTrajectory *trajectory = NULL;
    check(fg_trajectory_run(params, 0.3, 0.01, 50.0, FG_METHOD_RK4,
                            FG_MODE_CONSTRAINED, &trajectory),
          "fg_trajectory_run");
    size_t len = fg_trajectory_len(trajectory);
    double *shares = malloc(len * sizeof(double));
    fg_trajectory_column(trajectory, FG_TRAJECTORY_COLUMN_SHARE, shares, len);
    if (shares[len - 1] < 0.99) {
        fprintf(stderr, "trajectory did not cooperate: %f\n", shares[len - 1]);
        return 1;
    }
    printf("final share %f after %zu samples (converged=%d)\n", shares[len - 1],
           len, fg_trajectory_converged(trajectory));
    free(shares);
    fg_trajectory_free(trajectory);

    FgTopologyConfig topology = {20, 500.0, 500.0, 150.0, 214};
    FgSimConfig config = {5, 20, 5, FG_MODE_CONSTRAINED, 0.5, 0.01, 10.0,
                          FG_METHOD_RK4};
    FgSimulation *simulation = NULL;
    check(fg_simulation_run(params, topology, config, &simulation),
          "fg_simulation_run");
    size_t epochs = fg_simulation_epochs(simulation);
    double *normalized = malloc(epochs * sizeof(double));
    fg_simulation_column(simulation, FG_SIM_COLUMN_NORMALIZED_FORWARDED,
                         normalized, epochs);
    printf("normalized forwarded in last epoch: %f\n", normalized[epochs - 1]);
    free(normalized);
    fg_simulation_free(simulation);

    fg_params_free(params);
    printf("ok\n");
    return 0;
}
