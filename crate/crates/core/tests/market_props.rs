use std::collections::HashSet;

use dasim_core::market::{
    run_game, ClearingMode, GameEvent, GameLog, MarketConfig, Pricing, Schedule, ScheduleTimeline, ShoutOutcome,
};
use dasim_core::strategy::StrategySpec;
use proptest::prelude::*;

fn spec_by_index(i: usize) -> StrategySpec {
    let names = ["tt", "ziu", "zic", "zip", "re", "gd", "kaplan"];
    StrategySpec::from_name(names[i % names.len()]).unwrap()
}

fn setup() -> impl proptest::strategy::Strategy<Value = (MarketConfig, Schedule, Vec<StrategySpec>, u64)> {
    (
        proptest::collection::vec(1u32..200, 1..6),
        proptest::collection::vec(1u32..200, 1..6),
        1u32..3,
        any::<bool>(),
        any::<bool>(),
        0.0f64..=1.0,
        0.0f64..=1.0,
        prop_oneof![Just(None), (1u32..5).prop_map(Some)],
        any::<u64>(),
        proptest::collection::vec(0usize..7, 12),
    )
        .prop_map(|(b, s, units, improve, persistent, qs, k, periodic, seed, strat)| {
            let sched = Schedule::with_units(
                b.into_iter().map(f64::from).collect(),
                s.into_iter().map(f64::from).collect(),
                units,
            )
            .unwrap();
            let cfg = MarketConfig {
                clearing_mode: periodic.map_or(ClearingMode::Continuous, |rounds_per_clear| ClearingMode::Periodic {
                    rounds_per_clear,
                }),
                improvement_rule: improve,
                pricing: Pricing::Kda { k },
                qs,
                days: 2,
                rounds_per_day: 15,
                persistent_shouts: persistent,
                ..MarketConfig::default()
            };
            let specs = (0..sched.num_traders()).map(|i| spec_by_index(strat[i])).collect();
            (cfg, sched, specs, seed)
        })
}

fn check_log(log: &GameLog, specs: &[StrategySpec]) -> Result<(), TestCaseError> {
    let sched = log.timeline.base();
    let mut last = (0u32, 0u32, 0u64);
    let mut accepted = HashSet::new();
    let mut traded_per_day = vec![vec![0u32; sched.num_traders()]; log.config.days as usize];
    for e in &log.events {
        match e {
            GameEvent::Shout { shout, outcome } => {
                let t = (shout.time.day, shout.time.round, shout.time.seq);
                prop_assert!(t >= last, "shout times go backwards");
                last = t;
                prop_assert!(shout.price >= 0.0 && shout.price.is_finite());
                if *outcome == ShoutOutcome::Accepted {
                    accepted.insert(shout.time.seq);
                }
            }
            GameEvent::Transaction(tx) => {
                prop_assert!(accepted.contains(&tx.bid.time.seq) && accepted.contains(&tx.ask.time.seq));
                prop_assert!(tx.ask.price <= tx.price && tx.price <= tx.bid.price);
                let day = tx.time.day as usize;
                traded_per_day[day][tx.buyer().0] += 1;
                traded_per_day[day][tx.seller().0] += 1;
                for id in [tx.buyer(), tx.seller()] {
                    let v = sched.value_of(id).unwrap();
                    let profit = match sched.side_of(id).unwrap() {
                        dasim_core::market::Side::Buy => v - tx.price,
                        dasim_core::market::Side::Sell => tx.price - v,
                    };
                    if specs[id.0] != StrategySpec::ZiU {
                        prop_assert!(profit >= -1e-9, "{} lost {profit}", specs[id.0].name());
                    }
                }
            }
            GameEvent::Quote { quote, .. } => {
                if log.config.clearing_mode == ClearingMode::Continuous {
                    prop_assert!(
                        quote.bid < quote.ask || quote.bid == log.config.min_price || quote.ask == log.config.max_price
                    );
                }
            }
            GameEvent::DayStart { .. } => {}
        }
    }
    for day in &traded_per_day {
        prop_assert!(day.iter().all(|&n| n <= sched.units_per_trader_per_day));
    }
    if let ClearingMode::Periodic { .. } = log.config.clearing_mode {
        // every clearing round uses one price
        let mut by_round = std::collections::HashMap::new();
        for tx in log.transactions() {
            let p = *by_round.entry((tx.time.day, tx.time.round)).or_insert(tx.price);
            prop_assert_eq!(p, tx.price);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn game_invariants((cfg, sched, specs, seed) in setup()) {
        let timeline = ScheduleTimeline::from(sched);
        let log = run_game(&cfg, &timeline, &specs, seed).unwrap();
        check_log(&log, &specs)?;
        let again = run_game(&cfg, &timeline, &specs, seed).unwrap();
        prop_assert_eq!(log, again);
    }
}

#[test]
fn demand_shift_changes_values_mid_game() {
    let base = Schedule::new(vec![10.0], vec![5.0]).unwrap();
    let shifted = Schedule::new(vec![20.0], vec![5.0]).unwrap();
    let timeline = ScheduleTimeline::new(base, vec![(1, shifted)]).unwrap();
    let cfg = MarketConfig {
        days: 2,
        rounds_per_day: 5,
        ..MarketConfig::default()
    };
    let log = run_game(&cfg, &timeline, &vec![StrategySpec::Truthful; 2], 1).unwrap();
    let prices: Vec<f64> = log.transactions().map(|t| t.price).collect();
    assert_eq!(prices, vec![7.5, 12.5]);
}

#[test]
fn different_seeds_differ() {
    let sched = Schedule::new(
        (0..5).map(|i| 150.0 - 10.0 * i as f64).collect(),
        (0..5).map(|i| 50.0 + 10.0 * i as f64).collect(),
    )
    .unwrap();
    let cfg = MarketConfig::default();
    let specs = vec![StrategySpec::ZiC; 10];
    let a = run_game(&cfg, &sched.clone().into(), &specs, 1).unwrap();
    let b = run_game(&cfg, &sched.into(), &specs, 2).unwrap();
    assert_ne!(a.events, b.events);
}
