#ifndef FWDGAME_H
#define FWDGAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Integration scheme selector.
 */
typedef enum {
  FG_METHOD_EULER = 0,
  FG_METHOD_RK4 = 1,
} FgMethod;

/**
 * Dove strategy mode selector.
 */
typedef enum {
  FG_MODE_CONSTRAINED = 0,
  FG_MODE_BASELINE = 1,
} FgMode;

/**
 * Per-epoch simulation column selector. Integer counters are widened to
 * doubles; empty-class reputation means are NaN.
 */
typedef enum {
  FG_SIM_COLUMN_EPOCH = 0,
  FG_SIM_COLUMN_TIME = 1,
  FG_SIM_COLUMN_SHARE = 2,
  FG_SIM_COLUMN_REQUESTS = 3,
  FG_SIM_COLUMN_FORWARDS = 4,
  FG_SIM_COLUMN_REFUSALS = 5,
  FG_SIM_COLUMN_UNREACHABLE = 6,
  FG_SIM_COLUMN_NORMALIZED_FORWARDED = 7,
  FG_SIM_COLUMN_CUMULATIVE_NORMALIZED = 8,
  FG_SIM_COLUMN_MEAN_DOVE_REPUTATION = 9,
  FG_SIM_COLUMN_MEAN_HAWK_REPUTATION = 10,
} FgSimColumn;

/**
 * Status code of every fallible call.
 */
typedef enum {
  FG_STATUS_OK = 0,
  FG_STATUS_NULL_POINTER = 1,
  FG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Cooperation cannot pay: lambda <= 1.
   */
  FG_STATUS_NON_VIABLE_REGIME = 3,
} FgStatus;

/**
 * Per-sample trajectory column selector.
 */
typedef enum {
  FG_TRAJECTORY_COLUMN_TIME = 0,
  FG_TRAJECTORY_COLUMN_SHARE = 1,
  FG_TRAJECTORY_COLUMN_DOVE_UTILITY = 2,
  FG_TRAJECTORY_COLUMN_HAWK_UTILITY = 3,
  FG_TRAJECTORY_COLUMN_MEAN_UTILITY = 4,
  FG_TRAJECTORY_COLUMN_BAD_SOURCE_FORWARD_PROB = 5,
} FgTrajectoryColumn;

/**
 * Opaque handle around a validated parameter set.
 */
typedef struct FgParams FgParams;

/**
 * Opaque handle around a finished simulation run.
 */
typedef struct FgSimulation FgSimulation;

/**
 * Opaque handle around an integrated trajectory.
 */
typedef struct FgTrajectory FgTrajectory;

/**
 * Node placement and radio parameters for a simulation run.
 */
typedef struct {
  uint64_t n_nodes;
  double area_width;
  double area_height;
  double tx_range;
  uint64_t rng_seed;
} FgTopologyConfig;

/**
 * Traffic and coupling settings for a simulation run.
 */
typedef struct {
  uint64_t packets_per_node;
  uint64_t epochs;
  uint64_t rounds_per_epoch;
  FgMode mode;
  double p0;
  double dt;
  double horizon;
  FgMethod method;
} FgSimConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Validates and allocates a parameter set; the caller owns the handle and
 * must release it with `fg_params_free`.
 *
 * # Safety
 * `out` must be a valid pointer to writable handle storage.
 */
FgStatus fg_params_new(double lambda,
                       double delta_r,
                       double delta_g,
                       double delta_b,
                       FgParams **out);

/**
 * # Safety
 * `params` must be null or a handle returned by `fg_params_new` that has
 * not been freed.
 */
void fg_params_free(FgParams *params);

/**
 * Expected dove payoff for strategy `(s_d, s_h)` at dove share `p`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_dove_utility(const FgParams *params, double s_d, double s_h, double p, double *out);

/**
 * Expected hawk payoff at dove share `p` given the doves' `s_h`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_hawk_utility(const FgParams *params, double s_h, double p, double *out);

/**
 * Population mean payoff at dove share `p`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_mean_utility(const FgParams *params, double s_d, double s_h, double p, double *out);

/**
 * Expected per-decision reputation change of a dove.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_reputation_drift(const FgParams *params, double s_d, double s_h, double p, double *out);

/**
 * Closed-form optimal dove strategy at share `p`.
 *
 * # Safety
 * `params` must be a live handle; `out_s_d` and `out_s_h` must be writable.
 */
FgStatus fg_optimal_strategy(const FgParams *params, double p, double *out_s_d, double *out_s_h);

/**
 * Interior threshold share separating the two basins.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_threshold_share(const FgParams *params, double *out);

/**
 * dp/dt of the constrained replicator flow at share `p`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_replicator_rhs(const FgParams *params, double p, double *out);

/**
 * Integrates a trajectory; the caller owns the returned handle and must
 * release it with `fg_trajectory_free`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_trajectory_run(const FgParams *params,
                           double p0,
                           double dt,
                           double horizon,
                           FgMethod method,
                           FgMode mode,
                           FgTrajectory **out);

/**
 * Number of samples in the trajectory; 0 for a null handle.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
size_t fg_trajectory_len(const FgTrajectory *trajectory);

/**
 * Whether |dp/dt| fell below the convergence threshold by the horizon:
 * 1 converged, 0 not, -1 for a null handle.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
int32_t fg_trajectory_converged(const FgTrajectory *trajectory);

/**
 * Copies one column into `buffer` (up to `len` values) and returns the
 * number of values written.
 *
 * # Safety
 * `trajectory` must be a live handle; `buffer` must point to at least
 * `len` writable doubles.
 */
size_t fg_trajectory_column(const FgTrajectory *trajectory,
                            FgTrajectoryColumn column,
                            double *buffer,
                            size_t len);

/**
 * # Safety
 * `trajectory` must be null or a handle returned by `fg_trajectory_run`
 * that has not been freed.
 */
void fg_trajectory_free(FgTrajectory *trajectory);

/**
 * Runs the seeded forwarding simulation; the caller owns the returned
 * handle and must release it with `fg_simulation_free`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
FgStatus fg_simulation_run(const FgParams *params,
                           FgTopologyConfig topology,
                           FgSimConfig config,
                           FgSimulation **out);

/**
 * Number of per-epoch records; 0 for a null handle.
 *
 * # Safety
 * `simulation` must be null or a live handle.
 */
size_t fg_simulation_epochs(const FgSimulation *simulation);

/**
 * Copies one per-epoch column into `buffer` (up to `len` values) and
 * returns the number of values written.
 *
 * # Safety
 * `simulation` must be a live handle; `buffer` must point to at least
 * `len` writable doubles.
 */
size_t fg_simulation_column(const FgSimulation *simulation,
                            FgSimColumn column,
                            double *buffer,
                            size_t len);

/**
 * # Safety
 * `simulation` must be null or a handle returned by `fg_simulation_run`
 * that has not been freed.
 */
void fg_simulation_free(FgSimulation *simulation);

/**
 * Static name of a status code.
 */
const char *fg_status_name(FgStatus status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FWDGAME_H */
