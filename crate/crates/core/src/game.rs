//! Strategic form of the reputation-constrained forwarding game.
//!
//! Two node classes play a hawk-dove style packet-forwarding game. Doves
//! relay packets with probabilities that depend on the requester's
//! reputation class and choose the cheapest strategy that keeps their
//! expected reputation drift non-negative; hawks never relay. The binding
//! drift constraint yields a closed-form minimal forwarding probability
//! toward badly reputed requesters, checked here against an exhaustive
//! grid oracle.

use rand::Rng;

use crate::error::{Error, Result};

/// Feasibility slack used by the grid oracle, absorbing floating-point
/// rounding when a grid point sits exactly on the constraint boundary.
pub const DRIFT_FEASIBILITY_TOLERANCE: f64 = 1e-12;

/// Model constants of the forwarding game.
///
/// `lambda` is the benefit of one delivered packet per unit of forwarding
/// energy. The margins are the reputation changes per relay decision:
/// `delta_r` gained for forwarding, `delta_g` lost for refusing a
/// well-reputed requester, `delta_b` lost for refusing a badly reputed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    lambda: f64,
    delta_r: f64,
    delta_g: f64,
    delta_b: f64,
}

impl GameParams {
    /// All constants must be positive and finite, with `delta_b <= delta_g`:
    /// refusing a well-reputed node costs at least as much reputation.
    pub fn new(lambda: f64, delta_r: f64, delta_g: f64, delta_b: f64) -> Result<Self> {
        for (name, value) in [
            ("lambda", lambda),
            ("delta_r", delta_r),
            ("delta_g", delta_g),
            ("delta_b", delta_b),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                });
            }
        }
        if delta_b > delta_g {
            return Err(Error::InvalidParameter {
                name: "delta_b",
                value: delta_b,
                reason: "must not exceed delta_g",
            });
        }
        Ok(Self {
            lambda,
            delta_r,
            delta_g,
            delta_b,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta_r(&self) -> f64 {
        self.delta_r
    }

    pub fn delta_g(&self) -> f64 {
        self.delta_g
    }

    pub fn delta_b(&self) -> f64 {
        self.delta_b
    }

    /// The constrained dove optimum and everything built on it require
    /// `lambda > 1`; below that no node is motivated to forward at all.
    pub fn require_viable(&self) -> Result<()> {
        if self.lambda <= 1.0 {
            return Err(Error::NonViableRegime {
                lambda: self.lambda,
            });
        }
        Ok(())
    }

    /// Draws a random parameter set in the viable regime. Margins are kept
    /// in ranges where the invasion barriers stay resolvable by the default
    /// verification grids.
    pub fn sample_viable<R: Rng>(rng: &mut R) -> Self {
        let lambda = rng.gen_range(1.5..=4.0);
        let delta_r = rng.gen_range(1.0..=4.0);
        let delta_b = rng.gen_range(0.5..=delta_r);
        let delta_g = rng.gen_range(delta_b..=delta_b + 3.0);
        Self {
            lambda,
            delta_r,
            delta_g,
            delta_b,
        }
    }

    /// Row player's payoffs: forward (`Cooperate`) or drop (`NonCooperate`).
    pub fn payoff_matrix(&self) -> PayoffMatrix {
        PayoffMatrix {
            entries: [[self.lambda - 1.0, -1.0], [self.lambda, 0.0]],
        }
    }
}

/// Pure action in the one-shot forwarding game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Cooperate,
    NonCooperate,
}

impl Action {
    fn index(self) -> usize {
        match self {
            Action::Cooperate => 0,
            Action::NonCooperate => 1,
        }
    }
}

/// 2x2 strategic-form payoff matrix `[[lambda-1, -1], [lambda, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffMatrix {
    entries: [[f64; 2]; 2],
}

impl PayoffMatrix {
    pub fn payoff(&self, own: Action, opponent: Action) -> f64 {
        self.entries[own.index()][opponent.index()]
    }

    pub fn entries(&self) -> &[[f64; 2]; 2] {
        &self.entries
    }
}

/// A dove's mixed forwarding strategy: relay with probability `s_d` for a
/// well-reputed requester and `s_h` for a badly reputed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoveStrategy {
    s_d: f64,
    s_h: f64,
}

impl DoveStrategy {
    pub fn new(s_d: f64, s_h: f64) -> Result<Self> {
        check_probability("s_d", s_d)?;
        check_probability("s_h", s_h)?;
        Ok(Self { s_d, s_h })
    }

    /// The unconditional strategy (1, 1) of the unconstrained baseline game.
    pub fn always_forward() -> Self {
        Self { s_d: 1.0, s_h: 1.0 }
    }

    pub fn s_d(&self) -> f64 {
        self.s_d
    }

    pub fn s_h(&self) -> f64 {
        self.s_h
    }
}

/// Dove population share, validated to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationState {
    p: f64,
}

impl PopulationState {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self { p: check_share(p)? })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

pub(crate) fn check_share(p: f64) -> Result<f64> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::ShareOutOfRange(p))
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::ProbabilityOutOfRange { name, value })
    }
}

impl GameParams {
    /// Expected dove payoff `(lambda - 1) p s_d - s_h (1 - p)`.
    pub fn dove_utility(&self, strat: DoveStrategy, p: f64) -> Result<f64> {
        let p = check_share(p)?;
        Ok(self.dove_utility_unchecked(strat.s_d, strat.s_h, p))
    }

    #[inline]
    pub(crate) fn dove_utility_unchecked(&self, s_d: f64, s_h: f64, p: f64) -> f64 {
        (self.lambda - 1.0) * p * s_d - s_h * (1.0 - p)
    }

    /// Expected hawk payoff `lambda p s_h`: hawks pay nothing and free-ride
    /// on whatever forwarding probability doves grant badly reputed nodes.
    pub fn hawk_utility(&self, s_h: f64, p: f64) -> Result<f64> {
        let s_h = check_probability("s_h", s_h)?;
        let p = check_share(p)?;
        Ok(self.lambda * p * s_h)
    }

    #[inline]
    pub(crate) fn hawk_utility_unchecked(&self, s_h: f64, p: f64) -> f64 {
        self.lambda * p * s_h
    }

    /// Population mean payoff `p U(D, p) + (1 - p) U(H, p)`.
    pub fn mean_utility(&self, strat: DoveStrategy, p: f64) -> Result<f64> {
        let p = check_share(p)?;
        let u_dove = self.dove_utility_unchecked(strat.s_d, strat.s_h, p);
        let u_hawk = self.hawk_utility_unchecked(strat.s_h, p);
        Ok(p * u_dove + (1.0 - p) * u_hawk)
    }

    /// Expected per-decision reputation change of a dove playing `strat`
    /// in a population with dove share `p`. Doves are exactly the nodes
    /// that keep this drift non-negative.
    pub fn reputation_drift(&self, strat: DoveStrategy, p: f64) -> Result<f64> {
        let p = check_share(p)?;
        Ok(self.reputation_drift_unchecked(strat.s_d, strat.s_h, p))
    }

    #[inline]
    pub(crate) fn reputation_drift_unchecked(&self, s_d: f64, s_h: f64, p: f64) -> f64 {
        p * (s_d * self.delta_r - (1.0 - s_d) * self.delta_g)
            + (1.0 - p) * (s_h * self.delta_r - (1.0 - s_h) * self.delta_b)
    }

    /// Smallest `s_h` keeping the drift non-negative given `s_d = 1`,
    /// clamped to `[0, 1]`. Assumes `p` already lies in `[0, 1]`; the
    /// `p = 1` branch is exact (the constraint is slack there, and the
    /// formula's denominator vanishes).
    #[inline]
    pub(crate) fn s_h_star(&self, p: f64) -> f64 {
        if p >= 1.0 {
            return 0.0;
        }
        let numerator = (1.0 - p) * self.delta_b - p * self.delta_r;
        let raw = numerator / ((self.delta_b + self.delta_r) * (1.0 - p));
        raw.max(0.0)
    }

    /// Closed-form optimal dove strategy: full forwarding toward good
    /// requesters, and the smallest `s_h` that keeps the reputation drift
    /// non-negative. Requires the viable regime `lambda > 1`, where raising
    /// `s_d` is strictly profitable.
    pub fn optimal_dove_strategy(&self, p: f64) -> Result<DoveStrategy> {
        self.require_viable()?;
        let p = check_share(p)?;
        Ok(DoveStrategy {
            s_d: 1.0,
            s_h: self.s_h_star(p),
        })
    }

    /// Exhaustive search of the dove payoff over the `(grid_steps + 1)^2`
    /// lattice on `[0, 1]^2`, discarding points that violate the drift
    /// constraint. Ties are broken toward the smallest `s_h`, then the
    /// largest `s_d`, so degenerate cases (where the payoff ignores one
    /// coordinate) resolve to the same point as the closed form.
    ///
    /// This is the independent check on [`GameParams::optimal_dove_strategy`]
    /// and intentionally shares nothing with it beyond the payoff and drift
    /// evaluators.
    pub fn brute_force_dove_strategy(&self, p: f64, grid_steps: u32) -> Result<DoveStrategy> {
        let p = check_share(p)?;
        if grid_steps < 2 {
            return Err(Error::GridTooSmall {
                min: 2,
                got: grid_steps,
            });
        }
        let scale = f64::from(grid_steps);
        let mut best: Option<(f64, f64, f64)> = None; // (utility, s_h, s_d)
        for i in 0..=grid_steps {
            let s_h = f64::from(i) / scale;
            for j in (0..=grid_steps).rev() {
                let s_d = f64::from(j) / scale;
                if self.reputation_drift_unchecked(s_d, s_h, p) < -DRIFT_FEASIBILITY_TOLERANCE {
                    continue;
                }
                let u = self.dove_utility_unchecked(s_d, s_h, p);
                if best.is_none_or(|(bu, _, _)| u > bu) {
                    best = Some((u, s_h, s_d));
                }
            }
        }
        best.map(|(_, s_h, s_d)| DoveStrategy { s_d, s_h })
            .ok_or(Error::Infeasible)
    }
}
