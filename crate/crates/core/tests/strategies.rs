mod common;

use common::oracles::close;
use dasim_core::market::{run_game, MarketConfig, Schedule, ScheduleTimeline};
use dasim_core::metrics::MetricsReport;
use dasim_core::strategy::StrategySpec;

fn symmetric() -> ScheduleTimeline {
    Schedule::new(
        (0..10).map(|i| 150.0 - 10.0 * i as f64).collect(),
        (0..10).map(|i| 50.0 + 10.0 * i as f64).collect(),
    )
    .unwrap()
    .into()
}

fn market() -> MarketConfig {
    MarketConfig {
        improvement_rule: true,
        days: 5,
        rounds_per_day: 50,
        ..MarketConfig::default()
    }
}

fn mean_report(spec: StrategySpec, reps: u64, f: impl Fn(&MetricsReport) -> f64) -> f64 {
    let specs = vec![spec; 20];
    let xs: Vec<f64> = (0..reps)
        .map(|s| {
            let log = run_game(&market(), &symmetric(), &specs, s).unwrap();
            f(&MetricsReport::compute(&log).unwrap())
        })
        .collect();
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn truthful_traders_trade_at_midpoints_of_limits() {
    // TT shouts its limit; with the improvement rule the first cross
    // happens between the two most extreme traders
    let log = run_game(&market(), &symmetric(), &vec![StrategySpec::Truthful; 20], 1).unwrap();
    for t in log.transactions() {
        let sched = log.timeline.for_day(t.time.day);
        let v = sched.value_of(t.buyer()).unwrap();
        let c = sched.value_of(t.seller()).unwrap();
        assert!(close(t.price, 0.5 * (v + c), 1e-12));
    }
}

#[test]
fn zero_intelligence_constrained_never_loses() {
    let specs = vec![StrategySpec::ZiC; 20];
    for seed in 0..20 {
        let log = run_game(&market(), &symmetric(), &specs, seed).unwrap();
        for t in log.transactions() {
            let sched = log.timeline.for_day(t.time.day);
            assert!(t.price <= sched.value_of(t.buyer()).unwrap());
            assert!(t.price >= sched.value_of(t.seller()).unwrap());
        }
    }
}

#[test]
fn efficiency_ordering_of_homogeneous_markets() {
    let zic = mean_report(StrategySpec::ZiC, 30, |m| m.ea.unwrap_or(0.0));
    let zip = mean_report(StrategySpec::from_name("zip").unwrap(), 30, |m| m.ea.unwrap_or(0.0));
    let ziu = mean_report(StrategySpec::ZiU, 30, |m| m.ea_signed.unwrap_or(0.0));
    assert!(zic > 90.0, "zic {zic}");
    assert!(zip > zic, "zip {zip} zic {zic}");
    assert!(ziu < zic - 5.0, "ziu {ziu}");
}

#[test]
fn zip_prices_converge_across_days() {
    let first = mean_report(StrategySpec::from_name("zip").unwrap(), 20, |m| {
        m.alpha_by_day[0].unwrap()
    });
    let last = mean_report(StrategySpec::from_name("zip").unwrap(), 20, |m| {
        m.alpha_by_day[4].unwrap()
    });
    assert!(last < first, "{first} -> {last}");
}

#[test]
fn gd_and_re_achieve_high_efficiency() {
    for name in ["gd", "re"] {
        let ea = mean_report(StrategySpec::from_name(name).unwrap(), 20, |m| m.ea.unwrap_or(0.0));
        assert!(ea > 90.0, "{name}: {ea}");
    }
}

#[test]
fn kaplan_trades_against_zic_background() {
    // homogeneous Kaplan markets stall; ZI-C traders supply the spreads
    // Kaplan waits for
    let mut specs = vec![StrategySpec::ZiC; 20];
    specs[0] = StrategySpec::from_name("kaplan").unwrap();
    specs[10] = StrategySpec::from_name("kaplan").unwrap();
    let mut kaplan_trades = 0usize;
    for seed in 0..30 {
        let log = run_game(&market(), &symmetric(), &specs, seed).unwrap();
        kaplan_trades += log
            .transactions()
            .filter(|t| t.buyer().0 == 0 || t.seller().0 == 10)
            .count();
    }
    assert!(kaplan_trades > 0);
    let alone = run_game(
        &market(),
        &symmetric(),
        &vec![StrategySpec::from_name("kaplan").unwrap(); 20],
        0,
    )
    .unwrap();
    assert_eq!(alone.transactions().count(), 0);
}
