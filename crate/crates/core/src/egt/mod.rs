//! Heuristic strategy analysis.
//!
//! A [`HeuristicGame`] records, for every way of splitting `N` agents among
//! `S` strategies, the expected payoff of each strategy present. Payoffs are
//! estimated by simulating markets ([`estimate_game`]). Replicator dynamics
//! over the resulting symmetric game ([`replicator_flow`]) reveal which
//! mixtures are stable and how large their basins of attraction are
//! ([`find_equilibria`]).

mod dynamics;
mod estimate;
mod game;

pub use dynamics::{
    find_equilibria, is_nash, replicator_flow, Attractor, BasinReport, EquilibriumSearch, FlowConfig, FlowResult,
    NashCheck, ReplicatorField,
};
pub use estimate::{estimate_game, estimate_payoffs, role_assignment, EstimationConfig};
pub use game::{
    enumerate_profiles, mixture_payoff, mixture_payoff_se, perturb, HeuristicGame, PayoffEstimate, Profile,
};

use thiserror::Error;

use crate::market::MarketError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EgtError {
    #[error("payoff matrix has no entry for profile {0:?}")]
    MissingProfile(Profile),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mixture is not on the simplex: {0:?}")]
    NotOnSimplex(Vec<f64>),
    #[error("game failed for profile {profile:?}: {source}")]
    Game {
        profile: Profile,
        #[source]
        source: MarketError,
    },
}

/// Tolerance for simplex membership checks.
pub const SIMPLEX_TOL: f64 = 1e-9;

pub(crate) fn check_simplex(x: &[f64], s: usize) -> Result<(), EgtError> {
    let sum: f64 = x.iter().sum();
    if x.len() != s || x.iter().any(|v| !v.is_finite() || *v < -SIMPLEX_TOL) || (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(EgtError::NotOnSimplex(x.to_vec()));
    }
    Ok(())
}
