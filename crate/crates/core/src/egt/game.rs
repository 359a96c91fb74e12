use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{check_simplex, EgtError};

/// Number of agents playing each strategy.
pub type Profile = Vec<usize>;

/// All ways to split `n` agents among `s` strategies, in reverse
/// lexicographic order: `(n,0,..)` first, `(..,0,n)` last.
pub fn enumerate_profiles(s: usize, n: usize) -> Vec<Profile> {
    fn rec(s: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Profile>) {
        if s == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=n).rev() {
            prefix.push(k);
            rec(s - 1, n - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if s > 0 {
        rec(s, n, &mut Vec::with_capacity(s), &mut out);
    }
    out
}

/// Monte Carlo payoff estimate. `samples == 0` marks an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffEstimate {
    pub mean: f64,
    /// Sample variance of the per-replication payoffs.
    pub variance: f64,
    pub samples: usize,
}

impl PayoffEstimate {
    pub fn exact(mean: f64) -> Self {
        PayoffEstimate {
            mean,
            variance: 0.0,
            samples: 0,
        }
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n.max(1) as f64;
        let variance = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        PayoffEstimate {
            mean,
            variance,
            samples: n,
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            (self.variance / self.samples as f64).sqrt()
        }
    }
}

/// Symmetric `N`-player game over `S` strategies in count-profile form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeuristicGame {
    strategies: Vec<String>,
    n_agents: usize,
    profiles: Vec<Profile>,
    /// `payoffs[p][i]` is defined only where `profiles[p][i] > 0`.
    payoffs: Vec<Vec<Option<PayoffEstimate>>>,
    #[serde(skip)]
    index: HashMap<Profile, usize>,
}

impl HeuristicGame {
    /// An empty matrix over every profile.
    pub fn new(strategies: Vec<String>, n_agents: usize) -> Result<Self, EgtError> {
        if strategies.is_empty() {
            return Err(EgtError::InvalidArgument("need at least one strategy".into()));
        }
        if n_agents < 2 {
            return Err(EgtError::InvalidArgument("need at least two agents".into()));
        }
        let profiles = enumerate_profiles(strategies.len(), n_agents);
        let index = profiles.iter().cloned().zip(0..).collect();
        let payoffs = vec![vec![None; strategies.len()]; profiles.len()];
        Ok(HeuristicGame {
            strategies,
            n_agents,
            profiles,
            payoffs,
            index,
        })
    }

    /// A fully specified game with exact payoffs `f(profile, strategy)`.
    pub fn from_fn(
        strategies: Vec<String>,
        n_agents: usize,
        mut f: impl FnMut(&[usize], usize) -> f64,
    ) -> Result<Self, EgtError> {
        let mut game = Self::new(strategies, n_agents)?;
        for p in 0..game.profiles.len() {
            for i in 0..game.strategies.len() {
                if game.profiles[p][i] > 0 {
                    game.payoffs[p][i] = Some(PayoffEstimate::exact(f(&game.profiles[p], i)));
                }
            }
        }
        Ok(game)
    }

    pub fn strategies(&self) -> &[String] {
        &self.strategies
    }

    pub fn num_strategies(&self) -> usize {
        self.strategies.len()
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn profile_index(&self, profile: &[usize]) -> Option<usize> {
        if self.index.is_empty() {
            return self.profiles.iter().position(|p| p == profile);
        }
        self.index.get(profile).copied()
    }

    pub fn get(&self, profile: &[usize], strategy: usize) -> Option<&PayoffEstimate> {
        let p = self.profile_index(profile)?;
        self.payoffs[p].get(strategy)?.as_ref()
    }

    pub fn entries(&self, profile_idx: usize) -> &[Option<PayoffEstimate>] {
        &self.payoffs[profile_idx]
    }

    pub fn set(&mut self, profile: &[usize], strategy: usize, est: PayoffEstimate) -> Result<(), EgtError> {
        let p = self
            .profile_index(profile)
            .ok_or_else(|| EgtError::MissingProfile(profile.to_vec()))?;
        if strategy >= self.strategies.len() || profile[strategy] == 0 {
            return Err(EgtError::InvalidArgument(format!(
                "strategy {strategy} is absent from profile {profile:?}"
            )));
        }
        self.payoffs[p][strategy] = Some(est);
        Ok(())
    }

    /// True when every present strategy of every profile has a payoff.
    pub fn is_complete(&self) -> bool {
        self.profiles
            .iter()
            .zip(&self.payoffs)
            .all(|(p, row)| p.iter().zip(row).all(|(&c, e)| c == 0 || e.is_some()))
    }

    fn lookup(&self, profile: &[usize], strategy: usize) -> Result<&PayoffEstimate, EgtError> {
        self.get(profile, strategy)
            .ok_or_else(|| EgtError::MissingProfile(profile.to_vec()))
    }
}

impl PartialEq for HeuristicGame {
    fn eq(&self, other: &Self) -> bool {
        self.strategies == other.strategies
            && self.n_agents == other.n_agents
            && self.profiles == other.profiles
            && self.payoffs == other.payoffs
    }
}

pub(crate) fn log_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for k in 1..=n {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    lf
}

/// Probability of drawing `counts` from `x` in `sum(counts)` i.i.d. draws.
fn multinomial(counts: &[usize], x: &[f64], lf: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    let mut log_coef = lf[n];
    let mut prod = 1.0;
    for (&k, &xi) in counts.iter().zip(x) {
        log_coef -= lf[k];
        prod *= xi.max(0.0).powi(k as i32);
    }
    log_coef.exp() * prod
}

/// Calls `f(prob, full_profile)` for every opponent profile of `N − 1`
/// agents drawn from `x`, with one `i` player added back.
fn for_each_opponent_profile(
    game: &HeuristicGame,
    i: usize,
    x: &[f64],
    mut f: impl FnMut(f64, &[usize]) -> Result<(), EgtError>,
) -> Result<(), EgtError> {
    check_simplex(x, game.num_strategies())?;
    if i >= game.num_strategies() {
        return Err(EgtError::InvalidArgument(format!("no strategy {i}")));
    }
    let lf = log_factorials(game.n_agents);
    for mut opp in enumerate_profiles(game.num_strategies(), game.n_agents - 1) {
        let prob = multinomial(&opp, x, &lf);
        opp[i] += 1;
        if prob > 0.0 {
            f(prob, &opp)?;
        }
    }
    Ok(())
}

/// Expected payoff to one agent playing `i` when the other `N − 1` agents
/// play strategies drawn independently from `x`.
pub fn mixture_payoff(game: &HeuristicGame, i: usize, x: &[f64]) -> Result<f64, EgtError> {
    let mut total = 0.0;
    for_each_opponent_profile(game, i, x, |prob, profile| {
        total += prob * game.lookup(profile, i)?.mean;
        Ok(())
    })?;
    Ok(total)
}

/// Standard error of [`mixture_payoff`] from the per-entry standard errors,
/// treating entries as independent.
pub fn mixture_payoff_se(game: &HeuristicGame, i: usize, x: &[f64]) -> Result<f64, EgtError> {
    let mut var = 0.0;
    for_each_opponent_profile(game, i, x, |prob, profile| {
        var += (prob * game.lookup(profile, i)?.stderr()).powi(2);
        Ok(())
    })?;
    Ok(var.sqrt())
}

/// Moves `delta` of payoff from strategy `from` to strategy `to` in every
/// profile where both are played.
pub fn perturb(game: &HeuristicGame, from: usize, to: usize, delta: f64) -> Result<HeuristicGame, EgtError> {
    let s = game.num_strategies();
    if from >= s || to >= s {
        return Err(EgtError::InvalidArgument(format!(
            "strategy index out of range (S = {s})"
        )));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(EgtError::InvalidArgument(format!(
            "delta must be non-negative, got {delta}"
        )));
    }
    let mut out = game.clone();
    if delta == 0.0 || from == to {
        return Ok(out);
    }
    for (p, profile) in game.profiles.iter().enumerate() {
        if profile[from] == 0 || profile[to] == 0 {
            continue;
        }
        if let Some(e) = out.payoffs[p][from].as_mut() {
            e.mean -= delta;
        }
        if let Some(e) = out.payoffs[p][to].as_mut() {
            e.mean += delta;
        }
    }
    Ok(out)
}
