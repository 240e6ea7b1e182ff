//! Reputation-constrained packet-forwarding game.
//!
//! A hawk-dove population model of packet forwarding in infrastructure-less
//! wireless networks, where cooperative nodes (doves) pick the cheapest
//! forwarding strategy that keeps their expected reputation non-decreasing
//! and selfish nodes (hawks) never forward. The crate provides:
//!
//! - [`game`]: payoffs, the reputation-drift constraint, and the optimal
//!   dove strategy in closed form plus a brute-force grid oracle;
//! - [`dynamics`]: replicator dynamics, basin analysis, and numeric
//!   verification of evolutionary stability with invasion barriers;
//! - [`sim`]: a seeded agent-based forwarding simulation on a random
//!   geometric topology, with per-node reputation ledgers;
//! - [`cli`]: the `fwdgame` command-line front end emitting CSV series.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod sim;

pub use error::{Error, Result};
pub use game::{Action, DoveStrategy, GameParams, PayoffMatrix, PopulationState};
