use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::game::{enumerate_profiles, log_factorials};
use super::{check_simplex, mixture_payoff, mixture_payoff_se, EgtError, HeuristicGame, Profile};
use crate::seed::rng_from_seed;

/// The payoff field of a game, flattened for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct ReplicatorField {
    s: usize,
    opponents: Vec<Profile>,
    log_coef: Vec<f64>,
    /// `payoff[o][i]`: payoff to `i` against opponent profile `o`.
    payoff: Vec<Vec<f64>>,
}

impl ReplicatorField {
    pub fn new(game: &HeuristicGame) -> Result<Self, EgtError> {
        let s = game.num_strategies();
        let n = game.n_agents();
        let lf = log_factorials(n);
        let opponents = enumerate_profiles(s, n - 1);
        let mut log_coef = Vec::with_capacity(opponents.len());
        let mut payoff = Vec::with_capacity(opponents.len());
        for opp in &opponents {
            log_coef.push(lf[n - 1] - opp.iter().map(|&k| lf[k]).sum::<f64>());
            let mut row = Vec::with_capacity(s);
            for i in 0..s {
                let mut full = opp.clone();
                full[i] += 1;
                let e = game
                    .get(&full, i)
                    .ok_or_else(|| EgtError::MissingProfile(full.clone()))?;
                row.push(e.mean);
            }
            payoff.push(row);
        }
        Ok(ReplicatorField {
            s,
            opponents,
            log_coef,
            payoff,
        })
    }

    /// Expected payoff of every strategy against mixture `x`.
    pub fn payoffs(&self, x: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.s];
        for ((opp, lc), row) in self.opponents.iter().zip(&self.log_coef).zip(&self.payoff) {
            let mut prob = lc.exp();
            for (&k, &xi) in opp.iter().zip(x) {
                if k > 0 {
                    prob *= xi.max(0.0).powi(k as i32);
                }
            }
            if prob == 0.0 {
                continue;
            }
            for (ui, pi) in u.iter_mut().zip(row) {
                *ui += prob * pi;
            }
        }
        u
    }

    /// Replicator velocity `ẋ_i = x_i (u_i − ū)`.
    pub fn velocity(&self, x: &[f64]) -> Vec<f64> {
        let u = self.payoffs(x);
        let mean: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
        x.iter().zip(&u).map(|(xi, ui)| xi * (ui - mean)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub dt: f64,
    pub max_steps: usize,
    /// Converged once `‖ẋ‖∞` drops below this.
    pub tol: f64,
    /// Keep every n-th point of the trajectory.
    pub sample_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            dt: 0.01,
            max_steps: 200_000,
            tol: 1e-8,
            sample_every: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub start: Vec<f64>,
    pub terminal: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
    pub steps: usize,
    pub converged: bool,
    /// Largest `|Σx − 1|` seen after an integration step, before
    /// renormalisation.
    pub max_simplex_error: f64,
    /// Smallest component seen after an integration step, before clamping.
    pub min_component: f64,
    /// Index into [`BasinReport::attractors`]; `None` when unclassified.
    pub classified_attractor: Option<usize>,
}

fn axpy(x: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

fn integrate(field: &ReplicatorField, x0: &[f64], cfg: &FlowConfig) -> FlowResult {
    let mut x = x0.to_vec();
    let mut trajectory = vec![x.clone()];
    let mut max_err: f64 = 0.0;
    let mut min_comp = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut steps = 0;
    let h = cfg.dt;
    let converged = loop {
        let k1 = field.velocity(&x);
        if sup_norm(&k1) < cfg.tol {
            break true;
        }
        if steps == cfg.max_steps {
            break false;
        }
        let k2 = field.velocity(&axpy(&x, &k1, h / 2.0));
        let k3 = field.velocity(&axpy(&x, &k2, h / 2.0));
        let k4 = field.velocity(&axpy(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let sum: f64 = x.iter().sum();
        max_err = max_err.max((sum - 1.0).abs());
        min_comp = x.iter().cloned().fold(min_comp, f64::min);
        x.iter_mut().for_each(|v| *v = v.max(0.0));
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            x.iter_mut().for_each(|v| *v /= sum);
        }
        steps += 1;
        if cfg.sample_every > 0 && steps % cfg.sample_every == 0 {
            trajectory.push(x.clone());
        }
    };
    if trajectory.last() != Some(&x) {
        trajectory.push(x.clone());
    }
    FlowResult {
        start: x0.to_vec(),
        terminal: x,
        trajectory,
        steps,
        converged,
        max_simplex_error: max_err,
        min_component: min_comp,
        classified_attractor: None,
    }
}

/// Integrates replicator dynamics from `x0` with fixed-step RK4. A flow that
/// hits `max_steps` is returned with `converged == false`.
pub fn replicator_flow(game: &HeuristicGame, x0: &[f64], cfg: &FlowConfig) -> Result<FlowResult, EgtError> {
    check_simplex(x0, game.num_strategies())?;
    if !(cfg.dt > 0.0) {
        return Err(EgtError::InvalidArgument("dt must be positive".into()));
    }
    let field = ReplicatorField::new(game)?;
    Ok(integrate(&field, x0, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriumSearch {
    pub n_starts: usize,
    pub flow: FlowConfig,
    /// Terminals within this L∞ distance share an attractor.
    pub cluster_tol: f64,
    /// Components below this are treated as outside the support.
    pub support_tol: f64,
}

impl Default for EquilibriumSearch {
    fn default() -> Self {
        EquilibriumSearch {
            n_starts: 200,
            flow: FlowConfig::default(),
            cluster_tol: 1e-3,
            support_tol: 1e-3,
        }
    }
}

/// Result of checking the Nash condition on an estimated game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashCheck {
    pub is_nash: bool,
    pub payoffs: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub support: Vec<usize>,
}

/// Support payoffs must agree within two standard errors and no strategy
/// off the support may do better by more than two standard errors. A small
/// absolute slack absorbs integration error.
pub fn is_nash(game: &HeuristicGame, x: &[f64], support_tol: f64) -> Result<NashCheck, EgtError> {
    const SLACK: f64 = 1e-6;
    let s = game.num_strategies();
    let mut payoffs = Vec::with_capacity(s);
    let mut stderrs = Vec::with_capacity(s);
    for i in 0..s {
        payoffs.push(mixture_payoff(game, i, x)?);
        stderrs.push(mixture_payoff_se(game, i, x)?);
    }
    let support: Vec<usize> = (0..s).filter(|&i| x[i] > support_tol).collect();
    let band = |i: usize, j: usize| 2.0 * (stderrs[i].powi(2) + stderrs[j].powi(2)).sqrt() + SLACK;
    let mut ok = true;
    for &i in &support {
        for &j in &support {
            if (payoffs[i] - payoffs[j]).abs() > band(i, j) {
                ok = false;
            }
        }
        for k in (0..s).filter(|k| !support.contains(k)) {
            if payoffs[k] - payoffs[i] > band(i, k) {
                ok = false;
            }
        }
    }
    Ok(NashCheck {
        is_nash: ok,
        payoffs,
        stderrs,
        support,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attractor {
    pub mixture: Vec<f64>,
    /// Share of all starts whose flow ends here.
    pub basin: f64,
    pub starts: usize,
    pub nash: NashCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinReport {
    pub attractors: Vec<Attractor>,
    /// Flows that did not converge within `max_steps`.
    pub unclassified: usize,
    pub n_starts: usize,
    pub flows: Vec<FlowResult>,
}

impl BasinReport {
    pub fn unclassified_fraction(&self) -> f64 {
        self.unclassified as f64 / self.n_starts as f64
    }
}

/// Uniform draw from the simplex.
fn simplex_point(s: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..s).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = e.iter().sum();
    e.into_iter().map(|v| v / sum).collect()
}

/// Runs replicator flows from `n_starts` uniformly drawn mixtures and groups
/// the converged terminals into attractors.
pub fn find_equilibria(game: &HeuristicGame, search: &EquilibriumSearch, seed: u64) -> Result<BasinReport, EgtError> {
    if search.n_starts == 0 {
        return Err(EgtError::InvalidArgument("n_starts must be at least 1".into()));
    }
    let field = ReplicatorField::new(game)?;
    let mut rng = rng_from_seed(seed);
    let starts: Vec<Vec<f64>> = (0..search.n_starts)
        .map(|_| simplex_point(game.num_strategies(), &mut rng))
        .collect();
    let mut flows: Vec<FlowResult> = starts
        .par_iter()
        .map(|x0| integrate(&field, x0, &search.flow))
        .collect();

    let mut reps: Vec<Vec<f64>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut unclassified = 0;
    for flow in &mut flows {
        if !flow.converged {
            unclassified += 1;
            continue;
        }
        let hit = reps.iter().position(|r| {
            r.iter()
                .zip(&flow.terminal)
                .all(|(a, b)| (a - b).abs() <= search.cluster_tol)
        });
        let idx = hit.unwrap_or_else(|| {
            reps.push(flow.terminal.clone());
            counts.push(0);
            reps.len() - 1
        });
        counts[idx] += 1;
        flow.classified_attractor = Some(idx);
    }
    let attractors = reps
        .into_iter()
        .zip(counts)
        .map(|(mixture, starts)| {
            let nash = is_nash(game, &mixture, search.support_tol)?;
            Ok(Attractor {
                basin: starts as f64 / search.n_starts as f64,
                mixture,
                starts,
                nash,
            })
        })
        .collect::<Result<Vec<_>, EgtError>>()?;
    Ok(BasinReport {
        attractors,
        unclassified,
        n_starts: search.n_starts,
        flows,
    })
}
