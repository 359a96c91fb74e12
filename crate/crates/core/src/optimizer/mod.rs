//! Parameter search: a real-valued genetic algorithm with fitness functions
//! for ZIP parameters, mechanism parameters and basin size, plus an
//! epsilon-greedy bandit for online mechanism adaptation.

mod bandit;
mod fitness;
mod ga;

pub use bandit::{adapt_mechanism, epsilon_greedy_step, BanditState, PullRecord};
pub use fitness::{
    basin_fitness, candidate_basin, mechanism_fitness, objective_value, re_params_from_genes, re_space, zip_fitness,
    zip_params_from_genes, zip_space, BasinScenario, MechanismParam, Objective, Scenario,
};
pub use ga::{ga_run, GaConfig, GaResult, GenerationStats, Genotype, SearchSpace};

use thiserror::Error;

use crate::egt::EgtError;
use crate::market::MarketError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Egt(#[from] EgtError),
}
