//! C ABI for the fwdgame library.
//!
//! Handles are opaque pointers created and destroyed by this crate; every
//! fallible call returns an [`FgStatus`] and writes results through out
//! pointers. The header is generated into `include/fwdgame.h` by the build
//! script.

use std::ffi::c_char;

use fwdgame::dynamics::{self, Method, StrategyMode, Trajectory};
use fwdgame::sim::{run_simulation, SimConfig, SimOutput, TopologyConfig};
use fwdgame::{DoveStrategy, Error, GameParams};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Cooperation cannot pay: lambda <= 1.
    NonViableRegime = 3,
}

fn status_of(err: &Error) -> FgStatus {
    match err {
        Error::NonViableRegime { .. } => FgStatus::NonViableRegime,
        _ => FgStatus::InvalidArgument,
    }
}

/// Integration scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgMethod {
    Euler = 0,
    Rk4 = 1,
}

impl From<FgMethod> for Method {
    fn from(method: FgMethod) -> Self {
        match method {
            FgMethod::Euler => Method::Euler,
            FgMethod::Rk4 => Method::Rk4,
        }
    }
}

/// Dove strategy mode selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgMode {
    Constrained = 0,
    Baseline = 1,
}

impl From<FgMode> for StrategyMode {
    fn from(mode: FgMode) -> Self {
        match mode {
            FgMode::Constrained => StrategyMode::Constrained,
            FgMode::Baseline => StrategyMode::Baseline,
        }
    }
}

/// Opaque handle around a validated parameter set.
pub struct FgParams {
    inner: GameParams,
}

/// Opaque handle around an integrated trajectory.
pub struct FgTrajectory {
    inner: Trajectory,
}

/// Opaque handle around a finished simulation run.
pub struct FgSimulation {
    inner: SimOutput,
}

/// Per-sample trajectory column selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgTrajectoryColumn {
    Time = 0,
    Share = 1,
    DoveUtility = 2,
    HawkUtility = 3,
    MeanUtility = 4,
    BadSourceForwardProb = 5,
}

/// Per-epoch simulation column selector. Integer counters are widened to
/// doubles; empty-class reputation means are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgSimColumn {
    Epoch = 0,
    Time = 1,
    Share = 2,
    Requests = 3,
    Forwards = 4,
    Refusals = 5,
    Unreachable = 6,
    NormalizedForwarded = 7,
    CumulativeNormalized = 8,
    MeanDoveReputation = 9,
    MeanHawkReputation = 10,
}

/// Node placement and radio parameters for a simulation run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FgTopologyConfig {
    pub n_nodes: u64,
    pub area_width: f64,
    pub area_height: f64,
    pub tx_range: f64,
    pub rng_seed: u64,
}

/// Traffic and coupling settings for a simulation run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FgSimConfig {
    pub packets_per_node: u64,
    pub epochs: u64,
    pub rounds_per_epoch: u64,
    pub mode: FgMode,
    pub p0: f64,
    pub dt: f64,
    pub horizon: f64,
    pub method: FgMethod,
}

/// Validates and allocates a parameter set; the caller owns the handle and
/// must release it with `fg_params_free`.
///
/// # Safety
/// `out` must be a valid pointer to writable handle storage.
#[no_mangle]
pub unsafe extern "C" fn fg_params_new(
    lambda: f64,
    delta_r: f64,
    delta_g: f64,
    delta_b: f64,
    out: *mut *mut FgParams,
) -> FgStatus {
    if out.is_null() {
        return FgStatus::NullPointer;
    }
    match GameParams::new(lambda, delta_r, delta_g, delta_b) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(FgParams { inner }));
            FgStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// # Safety
/// `params` must be null or a handle returned by `fg_params_new` that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn fg_params_free(params: *mut FgParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

unsafe fn with_params<T>(
    params: *const FgParams,
    out: *mut T,
    f: impl FnOnce(&GameParams) -> Result<T, Error>,
) -> FgStatus {
    if params.is_null() || out.is_null() {
        return FgStatus::NullPointer;
    }
    match f(&(*params).inner) {
        Ok(value) => {
            *out = value;
            FgStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Expected dove payoff for strategy `(s_d, s_h)` at dove share `p`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_dove_utility(
    params: *const FgParams,
    s_d: f64,
    s_h: f64,
    p: f64,
    out: *mut f64,
) -> FgStatus {
    with_params(params, out, |game| {
        game.dove_utility(DoveStrategy::new(s_d, s_h)?, p)
    })
}

/// Expected hawk payoff at dove share `p` given the doves' `s_h`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_hawk_utility(
    params: *const FgParams,
    s_h: f64,
    p: f64,
    out: *mut f64,
) -> FgStatus {
    with_params(params, out, |game| game.hawk_utility(s_h, p))
}

/// Population mean payoff at dove share `p`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_mean_utility(
    params: *const FgParams,
    s_d: f64,
    s_h: f64,
    p: f64,
    out: *mut f64,
) -> FgStatus {
    with_params(params, out, |game| {
        game.mean_utility(DoveStrategy::new(s_d, s_h)?, p)
    })
}

/// Expected per-decision reputation change of a dove.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_reputation_drift(
    params: *const FgParams,
    s_d: f64,
    s_h: f64,
    p: f64,
    out: *mut f64,
) -> FgStatus {
    with_params(params, out, |game| {
        game.reputation_drift(DoveStrategy::new(s_d, s_h)?, p)
    })
}

/// Closed-form optimal dove strategy at share `p`.
///
/// # Safety
/// `params` must be a live handle; `out_s_d` and `out_s_h` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_optimal_strategy(
    params: *const FgParams,
    p: f64,
    out_s_d: *mut f64,
    out_s_h: *mut f64,
) -> FgStatus {
    if params.is_null() || out_s_d.is_null() || out_s_h.is_null() {
        return FgStatus::NullPointer;
    }
    match (*params).inner.optimal_dove_strategy(p) {
        Ok(strat) => {
            *out_s_d = strat.s_d();
            *out_s_h = strat.s_h();
            FgStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Interior threshold share separating the two basins.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_threshold_share(params: *const FgParams, out: *mut f64) -> FgStatus {
    with_params(params, out, dynamics::threshold_p_t)
}

/// dp/dt of the constrained replicator flow at share `p`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_replicator_rhs(
    params: *const FgParams,
    p: f64,
    out: *mut f64,
) -> FgStatus {
    with_params(params, out, |game| {
        dynamics::forwarding_replicator_rhs(game, p)
    })
}

/// Integrates a trajectory; the caller owns the returned handle and must
/// release it with `fg_trajectory_free`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_trajectory_run(
    params: *const FgParams,
    p0: f64,
    dt: f64,
    horizon: f64,
    method: FgMethod,
    mode: FgMode,
    out: *mut *mut FgTrajectory,
) -> FgStatus {
    if params.is_null() || out.is_null() {
        return FgStatus::NullPointer;
    }
    let game = &(*params).inner;
    let result = match mode {
        FgMode::Constrained => dynamics::integrate(game, p0, dt, horizon, method.into()),
        FgMode::Baseline => dynamics::integrate_baseline(game, p0, dt, horizon, method.into()),
    };
    match result {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(FgTrajectory { inner }));
            FgStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Number of samples in the trajectory; 0 for a null handle.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fg_trajectory_len(trajectory: *const FgTrajectory) -> usize {
    if trajectory.is_null() {
        0
    } else {
        (*trajectory).inner.samples.len()
    }
}

/// Whether |dp/dt| fell below the convergence threshold by the horizon:
/// 1 converged, 0 not, -1 for a null handle.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fg_trajectory_converged(trajectory: *const FgTrajectory) -> i32 {
    if trajectory.is_null() {
        -1
    } else {
        i32::from((*trajectory).inner.converged)
    }
}

/// Copies one column into `buffer` (up to `len` values) and returns the
/// number of values written.
///
/// # Safety
/// `trajectory` must be a live handle; `buffer` must point to at least
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fg_trajectory_column(
    trajectory: *const FgTrajectory,
    column: FgTrajectoryColumn,
    buffer: *mut f64,
    len: usize,
) -> usize {
    if trajectory.is_null() || buffer.is_null() {
        return 0;
    }
    let samples = &(*trajectory).inner.samples;
    let count = samples.len().min(len);
    for (i, sample) in samples.iter().take(count).enumerate() {
        let value = match column {
            FgTrajectoryColumn::Time => sample.t,
            FgTrajectoryColumn::Share => sample.p,
            FgTrajectoryColumn::DoveUtility => sample.u_dove,
            FgTrajectoryColumn::HawkUtility => sample.u_hawk,
            FgTrajectoryColumn::MeanUtility => sample.u_mean,
            FgTrajectoryColumn::BadSourceForwardProb => sample.s_h,
        };
        *buffer.add(i) = value;
    }
    count
}

/// # Safety
/// `trajectory` must be null or a handle returned by `fg_trajectory_run`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn fg_trajectory_free(trajectory: *mut FgTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Runs the seeded forwarding simulation; the caller owns the returned
/// handle and must release it with `fg_simulation_free`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_run(
    params: *const FgParams,
    topology: FgTopologyConfig,
    config: FgSimConfig,
    out: *mut *mut FgSimulation,
) -> FgStatus {
    if params.is_null() || out.is_null() {
        return FgStatus::NullPointer;
    }
    let topo_cfg = TopologyConfig {
        n_nodes: topology.n_nodes as usize,
        area_width: topology.area_width,
        area_height: topology.area_height,
        tx_range: topology.tx_range,
        rng_seed: topology.rng_seed,
    };
    let sim_cfg = SimConfig {
        packets_per_node: config.packets_per_node,
        epochs: config.epochs as usize,
        rounds_per_epoch: config.rounds_per_epoch as usize,
        mode: config.mode.into(),
        p0: config.p0,
        dt: config.dt,
        horizon: config.horizon,
        method: config.method.into(),
    };
    match run_simulation(&topo_cfg, &sim_cfg, &(*params).inner) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(FgSimulation { inner }));
            FgStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Number of per-epoch records; 0 for a null handle.
///
/// # Safety
/// `simulation` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_epochs(simulation: *const FgSimulation) -> usize {
    if simulation.is_null() {
        0
    } else {
        (*simulation).inner.records.len()
    }
}

/// Copies one per-epoch column into `buffer` (up to `len` values) and
/// returns the number of values written.
///
/// # Safety
/// `simulation` must be a live handle; `buffer` must point to at least
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_column(
    simulation: *const FgSimulation,
    column: FgSimColumn,
    buffer: *mut f64,
    len: usize,
) -> usize {
    if simulation.is_null() || buffer.is_null() {
        return 0;
    }
    let records = &(*simulation).inner.records;
    let count = records.len().min(len);
    for (i, record) in records.iter().take(count).enumerate() {
        let value = match column {
            FgSimColumn::Epoch => record.epoch as f64,
            FgSimColumn::Time => record.t,
            FgSimColumn::Share => record.p,
            FgSimColumn::Requests => record.requests as f64,
            FgSimColumn::Forwards => record.forwards as f64,
            FgSimColumn::Refusals => record.refusals as f64,
            FgSimColumn::Unreachable => record.unreachable as f64,
            FgSimColumn::NormalizedForwarded => record.normalized_forwarded,
            FgSimColumn::CumulativeNormalized => record.cumulative_normalized,
            FgSimColumn::MeanDoveReputation => record.mean_dove_reputation.unwrap_or(f64::NAN),
            FgSimColumn::MeanHawkReputation => record.mean_hawk_reputation.unwrap_or(f64::NAN),
        };
        *buffer.add(i) = value;
    }
    count
}

/// # Safety
/// `simulation` must be null or a handle returned by `fg_simulation_run`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_free(simulation: *mut FgSimulation) {
    if !simulation.is_null() {
        drop(Box::from_raw(simulation));
    }
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn fg_status_name(status: FgStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        FgStatus::Ok => b"ok\0",
        FgStatus::NullPointer => b"null pointer\0",
        FgStatus::InvalidArgument => b"invalid argument\0",
        FgStatus::NonViableRegime => b"non-viable regime (lambda <= 1)\0",
    };
    name.as_ptr().cast()
}
