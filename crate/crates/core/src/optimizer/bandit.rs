use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{objective_value, Objective, OptimizerError};
use crate::market::{run_game, MarketConfig, ScheduleTimeline};
use crate::metrics::MetricsReport;
use crate::seed::{derive_seed, rng_from_seed, SimRng};
use crate::strategy::StrategySpec;

/// Epsilon-greedy state over a fixed set of arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditState<A> {
    pub arms: Vec<A>,
    pub counts: Vec<u64>,
    pub means: Vec<f64>,
    pub epsilon: f64,
}

impl<A> BanditState<A> {
    pub fn new(arms: Vec<A>, epsilon: f64) -> Result<Self, OptimizerError> {
        if arms.is_empty() {
            return Err(OptimizerError::InvalidConfig("bandit needs at least one arm".into()));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(OptimizerError::InvalidConfig(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        let n = arms.len();
        Ok(BanditState {
            arms,
            counts: vec![0; n],
            means: vec![0.0; n],
            epsilon,
        })
    }

    /// Incremental mean update of `arm`.
    pub fn update(&mut self, arm: usize, reward: f64) {
        self.counts[arm] += 1;
        self.means[arm] += (reward - self.means[arm]) / self.counts[arm] as f64;
    }

    /// Highest estimated mean, ties to the lowest index.
    pub fn greedy_arm(&self) -> usize {
        let mut best = 0;
        for (i, &m) in self.means.iter().enumerate() {
            if m > self.means[best] {
                best = i;
            }
        }
        best
    }

    /// Every arm is pulled once before the epsilon-greedy rule applies.
    pub fn select(&self, rng: &mut SimRng) -> usize {
        if let Some(i) = self.counts.iter().position(|&c| c == 0) {
            return i;
        }
        if rng.random::<f64>() < self.epsilon {
            rng.random_range(0..self.arms.len())
        } else {
            self.greedy_arm()
        }
    }
}

/// Records `reward` for the arm just pulled and picks the next one.
pub fn epsilon_greedy_step<A>(state: &mut BanditState<A>, last_arm: usize, reward: f64, rng: &mut SimRng) -> usize {
    debug_assert!(reward.is_finite());
    state.update(last_arm, reward);
    state.select(rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullRecord {
    pub pull: usize,
    pub arm: usize,
    pub reward: f64,
    /// The pulled arm's mean reward after this pull.
    pub running_mean: f64,
}

/// Online mechanism adaptation: each pull runs one game under the chosen
/// arm's market configuration and feeds back the objective (efficiency by
/// default) as reward.
#[allow(clippy::too_many_arguments)]
pub fn adapt_mechanism(
    arms: Vec<MarketConfig>,
    epsilon: f64,
    timeline: &ScheduleTimeline,
    traders: &[StrategySpec],
    objective: Objective,
    pulls: usize,
    seed: u64,
) -> Result<(BanditState<MarketConfig>, Vec<PullRecord>), OptimizerError> {
    for a in &arms {
        a.validate()?;
    }
    let mut state = BanditState::new(arms, epsilon)?;
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let mut records = Vec::with_capacity(pulls);
    let mut arm = state.select(&mut rng);
    for pull in 0..pulls {
        let log = run_game(&state.arms[arm], timeline, traders, derive_seed(seed, 1 + pull as u64))?;
        let report = MetricsReport::compute(&log).expect("engine logs only scheduled traders");
        let reward = objective_value(&report, objective);
        let next = epsilon_greedy_step(&mut state, arm, reward, &mut rng);
        records.push(PullRecord {
            pull,
            arm,
            reward,
            running_mean: state.means[arm],
        });
        arm = next;
    }
    Ok((state, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_after_seeding() {
        let mut s = BanditState::new(vec!['a', 'b', 'c'], 0.0).unwrap();
        let mut rng = rng_from_seed(0);
        assert_eq!(s.select(&mut rng), 0);
        assert_eq!(epsilon_greedy_step(&mut s, 0, 0.2, &mut rng), 1);
        assert_eq!(epsilon_greedy_step(&mut s, 1, 0.7, &mut rng), 2);
        assert_eq!(epsilon_greedy_step(&mut s, 2, 0.7, &mut rng), 1);
        for _ in 0..10 {
            assert_eq!(s.select(&mut rng), 1);
        }
    }

    #[test]
    fn incremental_mean() {
        let mut s = BanditState::new(vec![()], 0.5).unwrap();
        for r in [1.0, 2.0, 6.0] {
            s.update(0, r);
        }
        assert!((s.means[0] - 3.0).abs() < 1e-12);
        assert!(BanditState::new(vec![()], 1.5).is_err());
    }

    #[test]
    fn uniform_when_epsilon_one() {
        let mut s = BanditState::new(vec![0, 1, 2, 3], 1.0).unwrap();
        let mut rng = rng_from_seed(42);
        let mut freq = [0usize; 4];
        let mut arm = s.select(&mut rng);
        let n = 100_000;
        for _ in 0..n {
            freq[arm] += 1;
            arm = epsilon_greedy_step(&mut s, arm, 1.0, &mut rng);
        }
        for f in freq {
            assert!((f as f64 / n as f64 - 0.25).abs() < 0.02);
        }
    }
}
