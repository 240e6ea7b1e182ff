//! Replicator dynamics of the forwarding game.
//!
//! Covers the general n-strategy replicator vector field, the one
//! specialized to the dove/hawk population (with the dove strategy
//! re-optimized at every population share), fixed-step integrators, the
//! interior threshold separating the two basins, and a sampling verifier
//! for evolutionary stability with empirical invasion barriers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{check_share, DoveStrategy, GameParams};

/// Default integration step.
pub const DEFAULT_DT: f64 = 0.01;
/// Default integration horizon, long enough for the reference settings to
/// converge from any interior start.
pub const DEFAULT_HORIZON: f64 = 50.0;
/// A trajectory is flagged converged when |dp/dt| falls below this.
pub const CONVERGENCE_EPS: f64 = 1e-10;

/// Fixed-step integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Euler,
    Rk4,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "euler" => Ok(Method::Euler),
            "rk4" => Ok(Method::Rk4),
            other => Err(format!("unknown method '{other}' (expected euler or rk4)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Euler => "euler",
            Method::Rk4 => "rk4",
        })
    }
}

/// Which dove strategy drives the population: the reputation-constrained
/// optimum recomputed at every share, or the unconstrained always-forward
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyMode {
    Constrained,
    Baseline,
}

impl StrategyMode {
    pub fn dove_strategy(self, params: &GameParams, p: f64) -> Result<DoveStrategy> {
        match self {
            StrategyMode::Constrained => params.optimal_dove_strategy(p),
            StrategyMode::Baseline => Ok(DoveStrategy::always_forward()),
        }
    }
}

impl FromStr for StrategyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "constrained" => Ok(StrategyMode::Constrained),
            "baseline" => Ok(StrategyMode::Baseline),
            other => Err(format!(
                "unknown mode '{other}' (expected constrained or baseline)"
            )),
        }
    }
}

impl fmt::Display for StrategyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyMode::Constrained => "constrained",
            StrategyMode::Baseline => "baseline",
        })
    }
}

/// One integration sample with the derived per-class payoffs and the dove
/// strategy in effect at that share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub p: f64,
    pub u_dove: f64,
    pub u_hawk: f64,
    pub u_mean: f64,
    pub s_h: f64,
}

/// Time-indexed population trajectory from the replicator flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// True when |dp/dt| at the final sample is below [`CONVERGENCE_EPS`].
    pub converged: bool,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least p0")
    }

    pub fn final_p(&self) -> f64 {
        self.final_sample().p
    }
}

/// General replicator vector field: per-strategy growth proportional to the
/// payoff advantage over the population mean.
///
/// Kept as the reference implementation for cross-checking the specialized
/// two-class field; validates that `shares` is a probability vector.
pub fn general_replicator_rhs(utilities: &[f64], shares: &[f64]) -> Result<Vec<f64>> {
    if utilities.len() != shares.len() {
        return Err(Error::LengthMismatch {
            utilities: utilities.len(),
            shares: shares.len(),
        });
    }
    let sum: f64 = shares.iter().sum();
    if shares.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(sum));
    }
    let mean: f64 = utilities.iter().zip(shares).map(|(u, x)| u * x).sum();
    Ok(utilities
        .iter()
        .zip(shares)
        .map(|(u, x)| x * (u - mean))
        .collect())
}

/// dp/dt of the dove share when doves play the constrained optimum at the
/// current share: `p (1 - p) (p (lambda - 1)(1 - s_h*) - s_h*)`.
pub fn forwarding_replicator_rhs(params: &GameParams, p: f64) -> Result<f64> {
    params.require_viable()?;
    let p = check_share(p)?;
    Ok(constrained_rhs(params, p))
}

#[inline]
fn constrained_rhs(params: &GameParams, p: f64) -> f64 {
    // Intermediate RK4 stages can poke just outside [0, 1]; the field is
    // only meaningful on the simplex.
    let p = p.clamp(0.0, 1.0);
    let s_h = optimal_s_h(params, p);
    p * (1.0 - p) * (p * (params.lambda() - 1.0) * (1.0 - s_h) - s_h)
}

#[inline]
fn baseline_rhs(p: f64) -> f64 {
    // With s_d = s_h = 1 the hawk-dove payoff gap is exactly 1 for every
    // lambda, so the flow reduces to -p(1-p).
    let p = p.clamp(0.0, 1.0);
    -p * (1.0 - p)
}

#[inline]
fn optimal_s_h(params: &GameParams, p: f64) -> f64 {
    // Same closed form as optimal_dove_strategy, without revalidation.
    if p >= 1.0 {
        return 0.0;
    }
    let numerator = (1.0 - p) * params.delta_b() - p * params.delta_r();
    (numerator / ((params.delta_b() + params.delta_r()) * (1.0 - p))).max(0.0)
}

fn step(method: Method, f: impl Fn(f64) -> f64, p: f64, dt: f64) -> f64 {
    match method {
        Method::Euler => p + dt * f(p),
        Method::Rk4 => {
            let k1 = f(p);
            let k2 = f(p + 0.5 * dt * k1);
            let k3 = f(p + 0.5 * dt * k2);
            let k4 = f(p + dt * k3);
            p + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        }
    }
}

fn integrate_with(
    params: &GameParams,
    p0: f64,
    dt: f64,
    horizon: f64,
    method: Method,
    mode: StrategyMode,
) -> Result<Trajectory> {
    let p0 = check_share(p0)?;
    if !dt.is_finite() || dt <= 0.0 || !horizon.is_finite() || horizon < dt {
        return Err(Error::InvalidStep { dt, horizon });
    }
    if mode == StrategyMode::Constrained {
        params.require_viable()?;
    }
    let f = |p: f64| match mode {
        StrategyMode::Constrained => constrained_rhs(params, p),
        StrategyMode::Baseline => baseline_rhs(p),
    };
    let n_steps = (horizon / dt).round().max(1.0) as usize;
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut p = p0;
    samples.push(make_sample(params, mode, 0.0, p)?);
    for k in 1..=n_steps {
        p = step(method, f, p, dt).clamp(0.0, 1.0);
        samples.push(make_sample(params, mode, k as f64 * dt, p)?);
    }
    let converged = f(p).abs() < CONVERGENCE_EPS;
    Ok(Trajectory { samples, converged })
}

fn make_sample(params: &GameParams, mode: StrategyMode, t: f64, p: f64) -> Result<Sample> {
    let strat = mode.dove_strategy(params, p)?;
    Ok(Sample {
        t,
        p,
        u_dove: params.dove_utility(strat, p)?,
        u_hawk: params.hawk_utility(strat.s_h(), p)?,
        u_mean: params.mean_utility(strat, p)?,
        s_h: strat.s_h(),
    })
}

/// Integrates the constrained replicator flow from `p0`.
pub fn integrate(
    params: &GameParams,
    p0: f64,
    dt: f64,
    horizon: f64,
    method: Method,
) -> Result<Trajectory> {
    integrate_with(params, p0, dt, horizon, method, StrategyMode::Constrained)
}

/// Integrates the unconstrained baseline (`s_d = s_h = 1`), whose flow is
/// `-p(1-p)` independent of lambda.
pub fn integrate_baseline(
    params: &GameParams,
    p0: f64,
    dt: f64,
    horizon: f64,
    method: Method,
) -> Result<Trajectory> {
    integrate_with(params, p0, dt, horizon, method, StrategyMode::Baseline)
}

/// Interior rest point `delta_b / (delta_b + lambda delta_r)`: the mixed
/// equilibrium separating the two basins of attraction.
pub fn threshold_p_t(params: &GameParams) -> Result<f64> {
    params.require_viable()?;
    Ok(params.delta_b() / (params.delta_b() + params.lambda() * params.delta_r()))
}

/// Invasion barrier attached to a stable rest point: either a constant or
/// a mutant-dependent expression `min(coefficient / q, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Barrier {
    Constant(f64),
    InverseInMutant { coefficient: f64 },
}

impl Barrier {
    pub fn eval(&self, q: f64) -> f64 {
        match *self {
            Barrier::Constant(value) => value,
            Barrier::InverseInMutant { coefficient } => (coefficient / q).min(1.0),
        }
    }
}

/// An evolutionarily stable rest point with its analytic invasion barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssPoint {
    pub p_star: f64,
    pub barrier: Barrier,
}

/// Closed-form equilibrium structure of the constrained game.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// Rest points of the flow: both vertices plus the interior threshold.
    pub fixed_points: [f64; 3],
    /// Interior mixed equilibrium; not evolutionarily stable.
    pub p_t: f64,
    /// The two stable points with their barriers.
    pub ess_points: Vec<EssPoint>,
}

impl EquilibriumReport {
    pub fn is_ess(&self, p_star: f64) -> bool {
        self.ess_points.iter().any(|e| e.p_star == p_star)
    }
}

/// Closed-form rest points, stability verdicts, and invasion barriers:
/// both vertices are stable (all-hawk with barrier `min(delta_b /
/// (delta_r q (lambda - 1)), 1)`, all-dove with barrier 1); the interior
/// threshold is the unstable mixed equilibrium.
pub fn equilibrium_report(params: &GameParams) -> Result<EquilibriumReport> {
    let p_t = threshold_p_t(params)?;
    let coefficient = params.delta_b() / (params.delta_r() * (params.lambda() - 1.0));
    Ok(EquilibriumReport {
        fixed_points: [0.0, p_t, 1.0],
        p_t,
        ess_points: vec![
            EssPoint {
                p_star: 0.0,
                barrier: Barrier::InverseInMutant { coefficient },
            },
            EssPoint {
                p_star: 1.0,
                barrier: Barrier::Constant(1.0),
            },
        ],
    })
}

/// One stability probe: resident share `resident` invaded by `mutant` at
/// fraction `epsilon`; `payoff_gap` is the resident-minus-mutant payoff in
/// the mixed population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssProbe {
    pub resident: f64,
    pub mutant: f64,
    pub epsilon: f64,
    pub payoff_gap: f64,
}

/// Evaluates one invasion probe. Mean payoffs are bilinear in the shares,
/// so the gap collapses to `(p - q) (x (lambda - 1)(1 - s_h*) - s_h*)` with
/// `x = (1 - eps) p + eps q`. The dove strategy is the one the resident
/// candidate pins down, not re-optimized at the mixed share.
pub fn ess_probe(
    params: &GameParams,
    resident: f64,
    mutant: f64,
    epsilon: f64,
) -> Result<EssProbe> {
    params.require_viable()?;
    let p = check_share(resident)?;
    let q = check_share(mutant)?;
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(Error::GridValueOutOfRange {
            name: "epsilon",
            value: epsilon,
        });
    }
    let s_h = optimal_s_h(params, p);
    let x = (1.0 - epsilon) * p + epsilon * q;
    let payoff_gap = (p - q) * (x * (params.lambda() - 1.0) * (1.0 - s_h) - s_h);
    Ok(EssProbe {
        resident: p,
        mutant: q,
        epsilon,
        payoff_gap,
    })
}

/// Empirical stability row for one mutant share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutantBarrier {
    pub mutant: f64,
    /// Largest sampled epsilon below which the resident strictly
    /// outperforms the mutant at every smaller sampled epsilon; `None`
    /// when the resident already loses at the smallest epsilon.
    pub empirical_barrier: Option<f64>,
}

/// Sampling verdict for one candidate rest point.
#[derive(Debug, Clone, PartialEq)]
pub struct EssClassification {
    pub candidate: f64,
    pub is_ess: bool,
    pub rows: Vec<MutantBarrier>,
}

impl EssClassification {
    /// Infimum of the empirical barriers over the sampled mutants; `None`
    /// unless every mutant admits one.
    pub fn barrier_infimum(&self) -> Option<f64> {
        self.rows
            .iter()
            .map(|r| r.empirical_barrier)
            .try_fold(f64::INFINITY, |acc, b| b.map(|v| acc.min(v)))
    }
}

/// Verifies stability of `candidate` by sampling: for every mutant share in
/// `mutant_grid` (the candidate itself is skipped) the payoff gap must stay
/// positive on a prefix of `epsilon_grid`; the largest such epsilon is the
/// empirical invasion barrier for that mutant.
pub fn classify_ess(
    params: &GameParams,
    candidate: f64,
    mutant_grid: &[f64],
    epsilon_grid: &[f64],
) -> Result<EssClassification> {
    params.require_viable()?;
    let candidate = check_share(candidate)?;
    if mutant_grid.is_empty() {
        return Err(Error::EmptyGrid("mutant grid"));
    }
    if epsilon_grid.is_empty() {
        return Err(Error::EmptyGrid("epsilon grid"));
    }
    for &q in mutant_grid {
        check_share(q).map_err(|_| Error::GridValueOutOfRange {
            name: "mutant",
            value: q,
        })?;
    }
    let mut epsilons = epsilon_grid.to_vec();
    epsilons.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));

    let mut rows = Vec::new();
    for &q in mutant_grid {
        if (q - candidate).abs() < 1e-12 {
            continue;
        }
        let mut barrier = None;
        for &eps in &epsilons {
            let probe = ess_probe(params, candidate, q, eps)?;
            if probe.payoff_gap > 0.0 {
                barrier = Some(eps);
            } else {
                break;
            }
        }
        rows.push(MutantBarrier {
            mutant: q,
            empirical_barrier: barrier,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyGrid("mutant grid contains only the candidate"));
    }
    let is_ess = rows.iter().all(|r| r.empirical_barrier.is_some());
    Ok(EssClassification {
        candidate,
        is_ess,
        rows,
    })
}

/// Default mutant grid 0.05, 0.10, ..., 1.00.
pub fn default_mutant_grid() -> Vec<f64> {
    (1..=20).map(|k| f64::from(k) * 0.05).collect()
}

/// Default epsilon grid 0.005, 0.010, ..., 0.995, resolving barriers to
/// about half a grid step.
pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=199).map(|k| f64::from(k) * 0.005).collect()
}

/// Predicted limit of the flow from `p0`: the threshold splits the basins,
/// and exactly at the threshold the flow rests.
pub fn basin_prediction(params: &GameParams, p0: f64) -> Result<f64> {
    let p_t = threshold_p_t(params)?;
    let p0 = check_share(p0)?;
    Ok(if p0 < p_t {
        0.0
    } else if p0 > p_t {
        1.0
    } else {
        p_t
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn base_params() -> GameParams {
        GameParams::new(3.0, 3.0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn general_rhs_equal_payoffs_freeze() {
        let rhs = general_replicator_rhs(&[1.7, 1.7, 1.7], &[0.2, 0.3, 0.5]).unwrap();
        for v in rhs {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn general_rhs_vertex_is_fixed() {
        let rhs = general_replicator_rhs(&[5.0, -2.0], &[1.0, 0.0]).unwrap();
        assert_eq!(rhs, vec![0.0, 0.0]);
    }

    #[test]
    fn general_rhs_hand_example() {
        let rhs = general_replicator_rhs(&[2.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(rhs, vec![0.25, -0.25]);
    }

    #[test]
    fn general_rhs_validation() {
        assert!(general_replicator_rhs(&[1.0], &[0.5, 0.5]).is_err());
        assert!(general_replicator_rhs(&[1.0, 2.0], &[0.7, 0.7]).is_err());
        assert!(general_replicator_rhs(&[1.0, 2.0], &[-0.2, 1.2]).is_err());
    }

    #[test]
    fn forwarding_rhs_boundary_fixed_points() {
        let params = base_params();
        assert_eq!(forwarding_replicator_rhs(&params, 0.0).unwrap(), 0.0);
        assert_eq!(forwarding_replicator_rhs(&params, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn forwarding_rhs_vanishes_at_threshold() {
        let params = base_params();
        let p_t = threshold_p_t(&params).unwrap();
        assert_eq!(p_t, 0.1);
        assert!(forwarding_replicator_rhs(&params, p_t).unwrap().abs() < 1e-15);
    }

    #[test]
    fn forwarding_rhs_hand_example() {
        // s_h*(0.5) = 0, so dp/dt = 0.5 * 0.5 * (0.5 * 2) = 0.25.
        let params = base_params();
        assert_eq!(forwarding_replicator_rhs(&params, 0.5).unwrap(), 0.25);
    }

    #[test]
    fn forwarding_rhs_rejects_non_viable() {
        let params = GameParams::new(0.9, 3.0, 3.0, 1.0).unwrap();
        assert!(forwarding_replicator_rhs(&params, 0.5).is_err());
    }

    #[test]
    fn specialization_matches_general_replicator() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let params = GameParams::sample_viable(&mut rng);
            for k in 0..=100 {
                let p = f64::from(k) / 100.0;
                let strat = params.optimal_dove_strategy(p).unwrap();
                let utilities = [
                    params.dove_utility(strat, p).unwrap(),
                    params.hawk_utility(strat.s_h(), p).unwrap(),
                ];
                let general = general_replicator_rhs(&utilities, &[p, 1.0 - p]).unwrap();
                let specialized = forwarding_replicator_rhs(&params, p).unwrap();
                assert!(
                    (general[0] - specialized).abs() < 1e-12,
                    "p {p}: {} vs {specialized}",
                    general[0]
                );
            }
        }
    }

    #[test]
    fn sign_law_on_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let params = GameParams::sample_viable(&mut rng);
            let p_t = threshold_p_t(&params).unwrap();
            for k in 1..1000 {
                let p = f64::from(k) / 1000.0;
                if (p - p_t).abs() < 1e-9 {
                    continue;
                }
                let rhs = forwarding_replicator_rhs(&params, p).unwrap();
                assert_eq!(
                    rhs.signum(),
                    (p - p_t).signum(),
                    "params {params:?} p {p} p_t {p_t} rhs {rhs}"
                );
            }
        }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_p_t(&base_params()).unwrap(), 0.1);
        let params = GameParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(threshold_p_t(&params).unwrap(), 1.0 / 3.0);
        let tiny = GameParams::new(3.0, 3.0, 3.0, 1e-12).unwrap();
        assert!(threshold_p_t(&tiny).unwrap() < 1e-11);
    }

    #[test]
    fn integrate_fixed_point_stays_constant() {
        let params = base_params();
        let traj = integrate(&params, 0.0, 0.01, 5.0, Method::Rk4).unwrap();
        assert!(traj.samples.iter().all(|s| s.p == 0.0));
        assert!(traj.converged);
    }

    #[test]
    fn integrate_basins() {
        let params = base_params();
        let up = integrate(&params, 0.3, 0.01, 50.0, Method::Rk4).unwrap();
        assert!(up.final_p() > 0.99, "final {}", up.final_p());
        let down = integrate(&params, 0.05, 0.01, 50.0, Method::Rk4).unwrap();
        assert!(down.final_p() < 0.01, "final {}", down.final_p());
    }

    #[test]
    fn integrate_confinement_and_monotonicity() {
        let params = base_params();
        for p0 in [0.05, 0.3, 0.7] {
            let traj = integrate(&params, p0, 0.01, 50.0, Method::Rk4).unwrap();
            let increasing = p0 > 0.1;
            for pair in traj.samples.windows(2) {
                assert!((0.0..=1.0).contains(&pair[1].p));
                if increasing {
                    assert!(pair[1].p >= pair[0].p, "overshoot at t {}", pair[1].t);
                } else {
                    assert!(pair[1].p <= pair[0].p, "overshoot at t {}", pair[1].t);
                }
            }
        }
    }

    #[test]
    fn integrate_step_halving_converges() {
        let params = base_params();
        let coarse = integrate(&params, 0.3, 0.01, 50.0, Method::Rk4).unwrap();
        let fine = integrate(&params, 0.3, 0.005, 50.0, Method::Rk4).unwrap();
        assert!((coarse.final_p() - fine.final_p()).abs() < 1e-6);
    }

    #[test]
    fn integrate_rejects_bad_steps() {
        let params = base_params();
        assert!(integrate(&params, 0.5, 0.0, 50.0, Method::Rk4).is_err());
        assert!(integrate(&params, 0.5, -0.01, 50.0, Method::Rk4).is_err());
        assert!(integrate(&params, 0.5, 0.01, 0.005, Method::Rk4).is_err());
        assert!(integrate(&params, 1.5, 0.01, 50.0, Method::Rk4).is_err());
    }

    #[test]
    fn baseline_decays_to_zero() {
        let params = base_params();
        let traj = integrate_baseline(&params, 0.7, 0.01, 50.0, Method::Rk4).unwrap();
        for pair in traj.samples.windows(2) {
            assert!(pair[1].p <= pair[0].p);
        }
        assert!(traj.final_p() < 0.01);
    }

    #[test]
    fn baseline_vertex_is_fixed() {
        let params = base_params();
        let traj = integrate_baseline(&params, 1.0, 0.01, 5.0, Method::Rk4).unwrap();
        assert!(traj.samples.iter().all(|s| s.p == 1.0));
    }

    #[test]
    fn baseline_matches_logistic_closed_form() {
        // dp/dt = -p(1-p) has p(t) = 1 / (1 + (1-p0)/p0 * e^t).
        let params = base_params();
        let p0 = 0.7;
        let traj = integrate_baseline(&params, p0, 0.01, 50.0, Method::Rk4).unwrap();
        for s in &traj.samples {
            let exact = 1.0 / (1.0 + (1.0 - p0) / p0 * s.t.exp());
            assert!((s.p - exact).abs() < 1e-4, "t {}: {} vs {exact}", s.t, s.p);
        }
    }

    #[test]
    fn baseline_is_lambda_independent() {
        let a = GameParams::new(2.0, 3.0, 3.0, 1.0).unwrap();
        let b = GameParams::new(7.0, 0.5, 0.5, 0.2).unwrap();
        let ta = integrate_baseline(&a, 0.6, 0.01, 10.0, Method::Rk4).unwrap();
        let tb = integrate_baseline(&b, 0.6, 0.01, 10.0, Method::Rk4).unwrap();
        for (sa, sb) in ta.samples.iter().zip(&tb.samples) {
            assert_eq!(sa.p.to_bits(), sb.p.to_bits());
        }
    }

    #[test]
    fn baseline_rhs_via_utilities_matches_simplification() {
        // Dual route: p(1-p)(U_D - U_H) with s = (1,1) against -p(1-p).
        let always = DoveStrategy::always_forward();
        for lambda in [1.5, 3.0, 6.0] {
            let params = GameParams::new(lambda, 2.0, 2.0, 1.0).unwrap();
            for k in 0..=20 {
                let p = f64::from(k) / 20.0;
                let gap =
                    params.dove_utility(always, p).unwrap() - params.hawk_utility(1.0, p).unwrap();
                let via_utilities = p * (1.0 - p) * gap;
                assert!((via_utilities - (-p * (1.0 - p))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn euler_and_rk4_agree_loosely() {
        let params = base_params();
        let e = integrate(&params, 0.3, 0.001, 20.0, Method::Euler).unwrap();
        let r = integrate(&params, 0.3, 0.001, 20.0, Method::Rk4).unwrap();
        assert!((e.final_p() - r.final_p()).abs() < 1e-3);
    }

    #[test]
    fn report_examples() {
        let report = equilibrium_report(&base_params()).unwrap();
        assert_eq!(report.p_t, 0.1);
        assert_eq!(report.fixed_points, [0.0, 0.1, 1.0]);
        assert!(report.is_ess(0.0) && report.is_ess(1.0) && !report.is_ess(0.1));
        let at_one = report.ess_points.iter().find(|e| e.p_star == 1.0).unwrap();
        assert_eq!(at_one.barrier.eval(0.5), 1.0);
        let at_zero = report.ess_points.iter().find(|e| e.p_star == 0.0).unwrap();
        assert!((at_zero.barrier.eval(1.0) - 1.0 / 6.0).abs() < 1e-15);
        // Small mutants cannot invade at any fraction.
        assert_eq!(at_zero.barrier.eval(0.05), 1.0);
    }

    #[test]
    fn probe_all_dove_resident_always_wins() {
        let params = base_params();
        for q in [0.0, 0.3, 0.9] {
            for eps in [0.01, 0.5, 0.99] {
                let probe = ess_probe(&params, 1.0, q, eps).unwrap();
                assert!(probe.payoff_gap > 0.0);
            }
        }
    }

    #[test]
    fn probe_hand_value() {
        // resident 1, mutant 0.5, eps 0.25: s_h* = 0, x = 0.875,
        // gap = 0.5 * 0.875 * 2 = 0.875.
        let probe = ess_probe(&base_params(), 1.0, 0.5, 0.25).unwrap();
        assert!((probe.payoff_gap - 0.875).abs() < 1e-15);
    }

    #[test]
    fn classify_matches_closed_form_verdicts() {
        let params = base_params();
        let q_grid = default_mutant_grid();
        let eps_grid = default_epsilon_grid();

        let at_zero = classify_ess(&params, 0.0, &q_grid, &eps_grid).unwrap();
        assert!(at_zero.is_ess);
        let full_mutant = at_zero.rows.iter().find(|r| r.mutant == 1.0).unwrap();
        let barrier = full_mutant.empirical_barrier.unwrap();
        assert!(
            (barrier - 1.0 / 6.0).abs() <= 0.01,
            "empirical barrier {barrier}"
        );

        let at_one = classify_ess(&params, 1.0, &q_grid, &eps_grid).unwrap();
        assert!(at_one.is_ess);
        // Barrier 1 up to grid resolution.
        assert!(at_one.barrier_infimum().unwrap() >= 0.995 - 1e-12);

        let at_threshold = classify_ess(&params, 0.1, &q_grid, &eps_grid).unwrap();
        assert!(!at_threshold.is_ess);
    }

    #[test]
    fn classify_agrees_with_report_on_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q_grid = default_mutant_grid();
        let eps_grid = default_epsilon_grid();
        for _ in 0..5 {
            let params = GameParams::sample_viable(&mut rng);
            let report = equilibrium_report(&params).unwrap();
            for point in &report.ess_points {
                let verdict = classify_ess(&params, point.p_star, &q_grid, &eps_grid).unwrap();
                assert!(verdict.is_ess, "params {params:?} p* {}", point.p_star);
                for row in &verdict.rows {
                    let analytic = point.barrier.eval(row.mutant);
                    let empirical = row.empirical_barrier.unwrap();
                    let resolution = 0.005 + 1e-12;
                    assert!(
                        empirical <= analytic + resolution && empirical >= analytic - resolution
                            || (analytic >= 0.995 && empirical >= 0.995 - 1e-12),
                        "params {params:?} q {}: empirical {empirical} analytic {analytic}",
                        row.mutant
                    );
                }
            }
            let mixed = classify_ess(&params, report.p_t, &q_grid, &eps_grid).unwrap();
            assert!(!mixed.is_ess, "params {params:?}");
        }
    }

    #[test]
    fn classify_rejects_empty_grids() {
        let params = base_params();
        assert!(classify_ess(&params, 0.0, &[], &[0.5]).is_err());
        assert!(classify_ess(&params, 0.0, &[0.5], &[]).is_err());
        assert!(classify_ess(&params, 0.5, &[0.5], &[0.1]).is_err());
    }

    #[test]
    fn basin_examples() {
        let params = base_params();
        assert_eq!(basin_prediction(&params, 0.3).unwrap(), 1.0);
        assert_eq!(basin_prediction(&params, 0.05).unwrap(), 0.0);
        assert_eq!(basin_prediction(&params, 0.1).unwrap(), 0.1);
    }

    #[test]
    fn basin_agrees_with_integrator() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for _ in 0..5 {
            let params = GameParams::sample_viable(&mut rng);
            let p_t = threshold_p_t(&params).unwrap();
            for p0 in [0.5 * p_t, p_t + 0.5 * (1.0 - p_t)] {
                let predicted = basin_prediction(&params, p0).unwrap();
                let traj = integrate(&params, p0, 0.01, 200.0, Method::Rk4).unwrap();
                assert!(
                    (traj.final_p() - predicted).abs() < 0.01,
                    "params {params:?} p0 {p0}: final {} predicted {predicted}",
                    traj.final_p()
                );
            }
        }
    }
}
