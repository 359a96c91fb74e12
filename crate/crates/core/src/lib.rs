//! Deterministic double-auction market simulation.
//!
//! The crate is organised around a single-unit double auction:
//!
//! - [`market`]: order book, shout validation, continuous and periodic
//!   clearing, pricing rules, and the day/round game loop.
//! - [`strategy`]: trading strategies (truth-telling, zero-intelligence,
//!   ZIP, Roth–Erev reinforcement, Gjerstad–Dickhaut belief-based, Kaplan
//!   sniping).
//! - [`metrics`]: allocative efficiency, Smith's convergence coefficient,
//!   profit dispersion and market power over a finished game.
//! - [`egt`]: heuristic payoff matrices estimated by simulation, replicator
//!   dynamics, equilibrium basins and perturbation analysis.
//! - [`optimizer`]: a real-valued genetic algorithm and an epsilon-greedy
//!   bandit used to search strategy and mechanism parameters.
//!
//! Every random decision is drawn from a seeded [`seed::SimRng`] stream, so a
//! game is a pure function of its configuration, schedule, strategies and
//! seed.

pub mod egt;
pub mod market;
pub mod metrics;
pub mod optimizer;
pub mod seed;
pub mod strategy;
