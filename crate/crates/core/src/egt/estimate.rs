use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{enumerate_profiles, EgtError, HeuristicGame, PayoffEstimate};
use crate::market::{run_game, MarketConfig, ScheduleTimeline};
use crate::metrics::trader_profits;
use crate::seed::{derive_seed, rng_from_seed};
use crate::strategy::StrategySpec;

/// Everything needed to estimate a heuristic payoff matrix by simulation.
/// The number of agents is the number of traders in the schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub market: MarketConfig,
    pub timeline: ScheduleTimeline,
    /// Labelled strategies; labels need not be distinct from the spec names.
    pub strategies: Vec<(String, StrategySpec)>,
    pub reps: usize,
}

impl EstimationConfig {
    pub fn n_agents(&self) -> usize {
        self.timeline.base().num_traders()
    }
}

/// Splits `counts` over `n_buyers` buyer and `n_sellers` seller seats as
/// evenly as the counts allow, then shuffles strategies within each side.
/// Returns the strategy index of each trader (buyers first).
pub fn role_assignment(counts: &[usize], n_buyers: usize, n_sellers: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = n_buyers + n_sellers;
    debug_assert_eq!(counts.iter().sum::<usize>(), n);
    // largest remainder apportionment of buyer seats, ties broken at random
    let mut buyers: Vec<usize> = counts.iter().map(|&c| c * n_buyers / n).collect();
    let mut left = n_buyers - buyers.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.shuffle(rng);
    order.sort_by_key(|&i| std::cmp::Reverse(counts[i] * n_buyers % n));
    for &i in &order {
        if left == 0 {
            break;
        }
        if buyers[i] < counts[i] {
            buyers[i] += 1;
            left -= 1;
        }
    }
    let mut buy_side = Vec::with_capacity(n_buyers);
    let mut sell_side = Vec::with_capacity(n_sellers);
    for (i, (&c, &b)) in counts.iter().zip(&buyers).enumerate() {
        buy_side.extend(std::iter::repeat_n(i, b));
        sell_side.extend(std::iter::repeat_n(i, c - b));
    }
    buy_side.shuffle(rng);
    sell_side.shuffle(rng);
    buy_side.extend(sell_side);
    buy_side
}

/// Mean whole-game profit of each strategy's agents in one game.
fn play_profile(cfg: &EstimationConfig, profile: &[usize], seed: u64) -> Result<Vec<Option<f64>>, EgtError> {
    let base = cfg.timeline.base();
    let mut assign_rng = rng_from_seed(seed);
    let seats = role_assignment(profile, base.num_buyers(), base.num_sellers(), &mut assign_rng);
    let specs: Vec<StrategySpec> = seats.iter().map(|&s| cfg.strategies[s].1.clone()).collect();
    let log = run_game(&cfg.market, &cfg.timeline, &specs, derive_seed(seed, 1)).map_err(|source| EgtError::Game {
        profile: profile.to_vec(),
        source,
    })?;
    let mut totals = vec![0.0; base.num_traders()];
    for (d, trades) in log.transactions_by_day().iter().enumerate() {
        let day = trader_profits(trades.iter().copied(), cfg.timeline.for_day(d as u32))
            .expect("engine only records trades between scheduled traders");
        totals.iter_mut().zip(day).for_each(|(t, p)| *t += p);
    }
    let mut sums = vec![0.0; profile.len()];
    for (&s, p) in seats.iter().zip(&totals) {
        sums[s] += p;
    }
    Ok(sums
        .iter()
        .zip(profile)
        .map(|(&sum, &c)| (c > 0).then(|| sum / c as f64))
        .collect())
}

fn rep_seed(seed: u64, profile_idx: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(seed, profile_idx as u64), rep as u64)
}

/// Per-strategy payoff estimates for one profile from `reps` games.
pub fn estimate_payoffs(
    cfg: &EstimationConfig,
    profile: &[usize],
    profile_idx: usize,
    seed: u64,
) -> Result<Vec<Option<PayoffEstimate>>, EgtError> {
    let samples = (0..cfg.reps)
        .map(|r| play_profile(cfg, profile, rep_seed(seed, profile_idx, r)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarise(profile, &samples))
}

fn summarise(profile: &[usize], samples: &[Vec<Option<f64>>]) -> Vec<Option<PayoffEstimate>> {
    (0..profile.len())
        .map(|i| {
            (profile[i] > 0).then(|| {
                let xs: Vec<f64> = samples.iter().filter_map(|s| s[i]).collect();
                PayoffEstimate::from_samples(&xs)
            })
        })
        .collect()
}

/// Estimates the full payoff matrix. Games for all (profile, replication)
/// pairs run in parallel; results are reduced in profile order so the
/// matrix depends only on `seed`.
pub fn estimate_game(cfg: &EstimationConfig, seed: u64) -> Result<HeuristicGame, EgtError> {
    if cfg.reps == 0 {
        return Err(EgtError::InvalidArgument("reps must be at least 1".into()));
    }
    let names = cfg.strategies.iter().map(|(n, _)| n.clone()).collect();
    let mut game = HeuristicGame::new(names, cfg.n_agents())?;
    let profiles = enumerate_profiles(cfg.strategies.len(), cfg.n_agents());
    let jobs: Vec<(usize, usize)> = (0..profiles.len())
        .flat_map(|p| (0..cfg.reps).map(move |r| (p, r)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, r)| play_profile(cfg, &profiles[p], rep_seed(seed, p, r)))
        .collect::<Result<Vec<_>, _>>()?;
    for (p, profile) in profiles.iter().enumerate() {
        let samples = &results[p * cfg.reps..(p + 1) * cfg.reps];
        for (i, est) in summarise(profile, samples).into_iter().enumerate() {
            if let Some(e) = est {
                game.set(profile, i, e)?;
            }
        }
    }
    Ok(game)
}
