use serde::{Deserialize, Serialize};

use super::{OptimizerError, SearchSpace};
use crate::egt::{estimate_game, find_equilibria, BasinReport, EquilibriumSearch, EstimationConfig};
use crate::market::{run_game, MarketConfig, Pricing, ScheduleTimeline};
use crate::metrics::MetricsReport;
use crate::seed::derive_seed;
use crate::strategy::{ReParams, StrategySpec, ZipParams};

/// α charged to a game without any trade.
const NO_TRADE_ALPHA: f64 = 100.0;

/// Quantity a search maximises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Minimise Smith's α.
    #[default]
    Alpha,
    /// Maximise allocative efficiency (signed profits).
    Efficiency,
    /// Minimise profit dispersion.
    Dispersion,
}

/// Signed so that larger is always better.
pub fn objective_value(report: &MetricsReport, objective: Objective) -> f64 {
    match objective {
        Objective::Alpha => -report.alpha.unwrap_or(NO_TRADE_ALPHA),
        Objective::Efficiency => report.ea_signed.unwrap_or(0.0),
        Objective::Dispersion => -report.profit_dispersion,
    }
}

/// A market and a trader population to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub market: MarketConfig,
    pub timeline: ScheduleTimeline,
    pub traders: Vec<StrategySpec>,
    pub reps: usize,
    pub objective: Objective,
}

impl Scenario {
    /// Mean objective over `reps` games seeded from `seed`.
    pub fn evaluate(&self, seed: u64) -> Result<f64, OptimizerError> {
        if self.reps == 0 {
            return Err(OptimizerError::InvalidConfig("reps must be at least 1".into()));
        }
        let mut total = 0.0;
        for r in 0..self.reps {
            let log = run_game(&self.market, &self.timeline, &self.traders, derive_seed(seed, r as u64))?;
            let report = MetricsReport::compute(&log).expect("engine logs only scheduled traders");
            total += objective_value(&report, self.objective);
        }
        Ok(total / self.reps as f64)
    }
}

/// Genes: β lo/hi, γ lo/hi, μ lo/hi, ca, cr.
pub fn zip_space() -> SearchSpace {
    SearchSpace {
        bounds: vec![
            (0.0, 1.0),
            (0.0, 1.0),
            (0.0, 0.99),
            (0.0, 0.99),
            (0.0, 1.0),
            (0.0, 1.0),
            (0.0, 1.0),
            (0.0, 0.2),
        ],
        ordered_pairs: vec![(0, 1), (2, 3), (4, 5)],
    }
}

pub fn zip_params_from_genes(g: &[f64]) -> ZipParams {
    let pair = |i: usize| [g[i].min(g[i + 1]), g[i].max(g[i + 1])];
    ZipParams {
        beta: pair(0),
        gamma: pair(2),
        margin: pair(4),
        ca: g[6],
        cr: g[7],
    }
}

/// Fitness of a ZIP genotype: every trader of the scenario becomes a ZIP
/// trader with these parameter ranges, and the scenario objective (by
/// default `−α`) is averaged over its games.
pub fn zip_fitness(genes: &[f64], scenario: &Scenario, seed: u64) -> Result<f64, OptimizerError> {
    if genes.len() != 8 {
        return Err(OptimizerError::InvalidConfig(format!(
            "ZIP genotype needs 8 genes, got {}",
            genes.len()
        )));
    }
    let spec = StrategySpec::Zip(zip_params_from_genes(genes));
    let s = Scenario {
        traders: vec![spec; scenario.timeline.base().num_traders()],
        ..scenario.clone()
    };
    s.evaluate(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismParam {
    Qs,
    K,
}

/// Objective of the scenario's market with one mechanism parameter set to
/// `value`. Setting `k` switches pricing to k-DA.
pub fn mechanism_fitness(
    param: MechanismParam,
    value: f64,
    scenario: &Scenario,
    seed: u64,
) -> Result<f64, OptimizerError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(OptimizerError::InvalidConfig(format!(
            "{param:?} must lie in [0, 1], got {value}"
        )));
    }
    let mut s = scenario.clone();
    match param {
        MechanismParam::Qs => s.market.qs = value,
        MechanismParam::K => s.market.pricing = Pricing::Kda { k: value },
    }
    s.evaluate(seed)
}

/// Genes: recency φ, experimentation ε, maximum margin.
pub fn re_space() -> SearchSpace {
    SearchSpace {
        bounds: vec![(0.0, 1.0), (0.0, 1.0), (0.01, 1.0)],
        ordered_pairs: Vec::new(),
    }
}

pub fn re_params_from_genes(g: &[f64]) -> ReParams {
    ReParams {
        recency: g[0],
        experimentation: g[1],
        max_margin: g[2],
        ..ReParams::default()
    }
}

/// Heuristic-game setup for basin-size fitness. The candidate is inserted
/// as strategy 0 ahead of `rivals`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinScenario {
    pub market: MarketConfig,
    pub timeline: ScheduleTimeline,
    pub rivals: Vec<(String, StrategySpec)>,
    pub reps: usize,
    pub search: EquilibriumSearch,
}

/// Total basin share of attractors that play strategy `idx`.
pub fn candidate_basin(report: &BasinReport, idx: usize, support_tol: f64) -> f64 {
    report
        .attractors
        .iter()
        .filter(|a| a.mixture[idx] > support_tol)
        .map(|a| a.basin)
        .sum()
}

/// Basin size of an RE learner with parameters from `genes`, measured in
/// the heuristic game against the scenario's rivals.
pub fn basin_fitness(genes: &[f64], scenario: &BasinScenario, seed: u64) -> Result<f64, OptimizerError> {
    if genes.len() != 3 {
        return Err(OptimizerError::InvalidConfig(format!(
            "RE genotype needs 3 genes, got {}",
            genes.len()
        )));
    }
    basin_fitness_of(StrategySpec::Re(re_params_from_genes(genes)), scenario, seed)
}

pub(crate) fn basin_fitness_of(
    candidate: StrategySpec,
    scenario: &BasinScenario,
    seed: u64,
) -> Result<f64, OptimizerError> {
    let mut strategies = vec![("candidate".to_string(), candidate)];
    strategies.extend(scenario.rivals.iter().cloned());
    let est = EstimationConfig {
        market: scenario.market.clone(),
        timeline: scenario.timeline.clone(),
        strategies,
        reps: scenario.reps,
    };
    let game = estimate_game(&est, derive_seed(seed, 0))?;
    let report = find_equilibria(&game, &scenario.search, derive_seed(seed, 1))?;
    Ok(candidate_basin(&report, 0, scenario.search.support_tol))
}
