//! Roth–Erev reinforcement learning over a discrete set of profit margins.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Strategy, TraderContext};
use crate::market::Side;
use crate::seed::SimRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReParams {
    /// Number of margin bins; bin `i` uses margin `(i+1)·max_margin/bins`.
    pub bins: usize,
    pub max_margin: f64,
    /// Recency (forgetting) parameter φ.
    pub recency: f64,
    /// Experimentation parameter ε.
    pub experimentation: f64,
    pub initial_propensity: f64,
}

impl Default for ReParams {
    fn default() -> Self {
        ReParams {
            bins: 8,
            max_margin: 0.4,
            recency: 0.1,
            experimentation: 0.2,
            initial_propensity: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReState {
    pub propensities: Vec<f64>,
    pub margins: Vec<f64>,
    pub recency: f64,
    pub experimentation: f64,
}

impl ReState {
    pub fn new(params: &ReParams) -> Self {
        let k = params.bins.max(1);
        ReState {
            propensities: vec![params.initial_propensity.max(f64::MIN_POSITIVE); k],
            margins: (0..k).map(|i| (i + 1) as f64 * params.max_margin / k as f64).collect(),
            recency: params.recency,
            experimentation: params.experimentation,
        }
    }

    pub fn bins(&self) -> usize {
        self.propensities.len()
    }

    /// Draws a bin with probability proportional to its propensity and
    /// returns it with the resulting no-loss price.
    pub fn choose<R: Rng + ?Sized>(&self, ctx: &TraderContext<'_>, rng: &mut R) -> (usize, f64) {
        let total: f64 = self.propensities.iter().sum();
        let bin = if total > 0.0 && total.is_finite() {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = self.bins() - 1;
            for (i, &q) in self.propensities.iter().enumerate() {
                if r < q {
                    chosen = i;
                    break;
                }
                r -= q;
            }
            chosen
        } else {
            rng.random_range(0..self.bins())
        };
        let m = self.margins[bin];
        let price = match ctx.side {
            Side::Buy => ctx.limit * (1.0 - m).max(0.0),
            Side::Sell => ctx.limit * (1.0 + m),
        };
        (bin, ctx.no_loss(price))
    }

    /// Roth–Erev update after `reward` for having played `chosen`.
    pub fn update(&mut self, chosen: usize, reward: f64) {
        let k = self.bins();
        let (phi, eps) = (self.recency, self.experimentation);
        for (i, q) in self.propensities.iter_mut().enumerate() {
            let share = if k == 1 {
                reward
            } else if i == chosen {
                (1.0 - eps) * reward
            } else {
                eps * reward / (k - 1) as f64
            };
            // floor keeps the choice distribution defined after long droughts
            *q = ((1.0 - phi) * *q + share).max(f64::MIN_POSITIVE);
        }
    }
}

#[derive(Debug, Clone)]
pub struct Re {
    state: ReState,
    last_bin: Option<usize>,
}

impl Re {
    pub fn new(params: &ReParams) -> Self {
        Re {
            state: ReState::new(params),
            last_bin: None,
        }
    }

    pub fn state(&self) -> &ReState {
        &self.state
    }
}

impl Strategy for Re {
    fn name(&self) -> &'static str {
        "re"
    }

    fn shout(&mut self, ctx: &TraderContext<'_>, rng: &mut SimRng) -> Option<f64> {
        let (bin, price) = self.state.choose(ctx, rng);
        self.last_bin = Some(bin);
        Some(price)
    }

    fn end_round(&mut self, reward: f64) {
        if let Some(bin) = self.last_bin.take() {
            self.state.update(bin, reward.max(0.0));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::strategy::test_support::ctx;
    use proptest::prelude::*;

    fn state(props: Vec<f64>, phi: f64, eps: f64) -> ReState {
        let k = props.len();
        ReState {
            margins: (0..k).map(|i| 0.05 * (i + 1) as f64).collect(),
            propensities: props,
            recency: phi,
            experimentation: eps,
        }
    }

    #[test]
    fn equal_propensities_choose_uniformly() {
        let s = state(vec![1.0; 4], 0.1, 0.2);
        let c = ctx(Side::Buy, 100.0);
        let mut rng = rng_from_seed(2);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[s.choose(&c, &mut rng).0] += 1;
        }
        for k in counts {
            assert!((k as f64 / n as f64 - 0.25).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn single_nonzero_bin_always_chosen() {
        let s = state(vec![0.0, 0.0, 3.0, 0.0], 0.1, 0.2);
        let c = ctx(Side::Sell, 100.0);
        let mut rng = rng_from_seed(2);
        for _ in 0..1000 {
            let (bin, price) = s.choose(&c, &mut rng);
            assert_eq!(bin, 2);
            assert!(price >= 100.0);
        }
    }

    #[test]
    fn update_boundaries() {
        let mut s = state(vec![1.0, 2.0, 3.0], 0.0, 0.0);
        s.update(1, 5.0);
        assert_eq!(s.propensities, vec![1.0, 7.0, 3.0]);

        let mut s = state(vec![1.0, 2.0, 3.0], 0.1, 0.2);
        s.update(0, 0.0);
        for (q, q0) in s.propensities.iter().zip([1.0, 2.0, 3.0]) {
            assert!((q - 0.9 * q0).abs() < 1e-12);
        }
    }

    #[test]
    fn propensity_sum_identity() {
        let mut s = state(vec![1.0, 2.0, 3.0, 4.0], 0.1, 0.2);
        let before: f64 = s.propensities.iter().sum();
        s.update(2, 7.5);
        let after: f64 = s.propensities.iter().sum();
        assert!((after - (0.9 * before + 7.5)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn propensities_stay_non_negative(
            rewards in proptest::collection::vec((0usize..8, 0.0..100.0f64), 1..300),
            phi in 0.0..1.0f64,
            eps in 0.0..1.0f64,
        ) {
            let mut s = ReState::new(&ReParams { recency: phi, experimentation: eps, ..Default::default() });
            for (bin, r) in rewards {
                s.update(bin, r);
                prop_assert!(s.propensities.iter().all(|&q| q >= 0.0));
                prop_assert!(s.propensities.iter().any(|&q| q > 0.0));
            }
        }
    }
}
