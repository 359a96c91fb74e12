use dasim_core::egt::{
    estimate_game, estimate_payoffs, find_equilibria, mixture_payoff, perturb, replicator_flow, EquilibriumSearch,
    EstimationConfig, FlowConfig, HeuristicGame,
};
use dasim_core::market::{MarketConfig, Schedule};
use dasim_core::strategy::StrategySpec;
use proptest::prelude::*;

fn coordination() -> HeuristicGame {
    // two-player coordination: (A, A) pays 2, (B, B) pays 1, mismatches 0
    HeuristicGame::from_fn(vec!["A".into(), "B".into()], 2, |p, i| match (p, i) {
        ([2, 0], 0) => 2.0,
        ([0, 2], 1) => 1.0,
        _ => 0.0,
    })
    .unwrap()
}

#[test]
fn coordination_game_has_two_basins() {
    let rep = find_equilibria(&coordination(), &EquilibriumSearch::default(), 3).unwrap();
    assert_eq!(rep.attractors.len(), 2);
    let total: f64 = rep.attractors.iter().map(|a| a.basin).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(rep.unclassified, 0);
    // the separatrix sits at x_A = 1/3: compare with a grid of starts
    for a in &rep.attractors {
        let expected = if a.mixture[0] > 0.5 {
            // starts with x_A > 1/3 go to all-A; uniform on [0,1]
            2.0 / 3.0
        } else {
            1.0 / 3.0
        };
        assert!((a.basin - expected).abs() < 0.1, "{a:?}");
        assert!(a.nash.is_nash);
    }
    let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    for &x in &grid {
        let r = replicator_flow(&coordination(), &[x, 1.0 - x], &FlowConfig::default()).unwrap();
        let to_a = r.terminal[0] > 0.5;
        if (x - 1.0 / 3.0).abs() > 0.01 {
            assert_eq!(to_a, x > 1.0 / 3.0, "start {x}");
        }
    }
}

#[test]
fn dominant_strategy_attracts_every_interior_flow() {
    // strategy 2 beats everything by 1 in every profile
    let g = HeuristicGame::from_fn(vec!["a".into(), "b".into(), "c".into()], 4, |p, i| {
        (p[0] as f64) * 0.3 - (p[1] as f64) * 0.2 + if i == 2 { 1.0 } else { 0.0 }
    })
    .unwrap();
    let rep = find_equilibria(
        &g,
        &EquilibriumSearch {
            n_starts: 50,
            ..Default::default()
        },
        9,
    )
    .unwrap();
    assert_eq!(rep.attractors.len(), 1);
    assert!(rep.attractors[0].mixture[2] > 1.0 - 1e-6);
    assert_eq!(rep.attractors[0].basin, 1.0);
}

#[test]
fn find_equilibria_is_deterministic() {
    let a = find_equilibria(
        &coordination(),
        &EquilibriumSearch {
            n_starts: 40,
            ..Default::default()
        },
        5,
    )
    .unwrap();
    let b = find_equilibria(
        &coordination(),
        &EquilibriumSearch {
            n_starts: 40,
            ..Default::default()
        },
        5,
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn perturbation_conserves_pair_payoff() {
    let g = coordination();
    let h = perturb(&g, 0, 1, 0.7).unwrap();
    for p in g.profiles() {
        if p[0] > 0 && p[1] > 0 {
            let before = g.get(p, 0).unwrap().mean + g.get(p, 1).unwrap().mean;
            let after = h.get(p, 0).unwrap().mean + h.get(p, 1).unwrap().mean;
            assert!((before - after).abs() < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn flows_stay_on_simplex(a in 0.0f64..1.0, b in 0.0f64..1.0, seed in 0u64..1000) {
        let g = HeuristicGame::from_fn(vec!["x".into(), "y".into(), "z".into()], 3, |p, i| {
            ((seed + 7 * i as u64 + 3 * p[0] as u64 + 5 * p[1] as u64) % 11) as f64
        }).unwrap();
        let x0 = [a * (1.0 - b), (1.0 - a) * (1.0 - b), b];
        let s: f64 = x0.iter().sum();
        let x0 = x0.map(|v| v / s);
        let r = replicator_flow(&g, &x0, &FlowConfig { max_steps: 5_000, ..Default::default() }).unwrap();
        prop_assert!(r.max_simplex_error < 1e-9);
        prop_assert!(r.min_component > -1e-12);
        for x in &r.trajectory {
            prop_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_mixtures_read_matrix_entries(j in 0usize..3, i in 0usize..3) {
        let g = HeuristicGame::from_fn(vec!["x".into(), "y".into(), "z".into()], 4, |p, k| {
            (p[0] * 100 + p[1] * 10 + p[2]) as f64 + k as f64 * 0.5
        }).unwrap();
        let mut x = [0.0; 3];
        x[j] = 1.0;
        let mut profile = vec![0; 3];
        profile[j] += 3;
        profile[i] += 1;
        prop_assert_eq!(mixture_payoff(&g, i, &x).unwrap(), g.get(&profile, i).unwrap().mean);
    }
}

fn small_market(strategies: Vec<(String, StrategySpec)>, reps: usize) -> EstimationConfig {
    EstimationConfig {
        market: MarketConfig {
            rounds_per_day: 25,
            improvement_rule: true,
            ..MarketConfig::default()
        },
        timeline: Schedule::new(vec![150.0, 120.0, 90.0], vec![60.0, 90.0, 120.0])
            .unwrap()
            .into(),
        strategies,
        reps,
    }
}

#[test]
fn duplicate_labels_earn_equal_payoffs() {
    let cfg = small_market(
        vec![("zic_a".into(), StrategySpec::ZiC), ("zic_b".into(), StrategySpec::ZiC)],
        400,
    );
    let est = estimate_payoffs(&cfg, &[3, 3], 0, 17).unwrap();
    let (a, b) = (est[0].unwrap(), est[1].unwrap());
    let band = 2.0 * (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() <= band, "{a:?} {b:?}");
}

#[test]
fn stderr_shrinks_with_reps() {
    let cfg = |reps| small_market(vec![("zic".into(), StrategySpec::ZiC)], reps);
    let small = estimate_payoffs(&cfg(200), &[6], 0, 1).unwrap()[0].unwrap();
    let large = estimate_payoffs(&cfg(400), &[6], 0, 2).unwrap()[0].unwrap();
    let ratio = large.stderr() / small.stderr();
    assert!((ratio - 1.0 / 2f64.sqrt()).abs() < 0.15, "ratio {ratio}");
}

#[test]
fn estimated_game_pipeline() {
    let strategies = vec![
        ("tt".into(), StrategySpec::Truthful),
        ("zic".into(), StrategySpec::ZiC),
        ("kaplan".into(), StrategySpec::from_name("kaplan").unwrap()),
    ];
    let cfg = small_market(strategies, 10);
    let game = estimate_game(&cfg, 4).unwrap();
    assert_eq!(game.profiles().len(), 28);
    assert!(game.is_complete());
    let rep = find_equilibria(
        &game,
        &EquilibriumSearch {
            n_starts: 50,
            ..Default::default()
        },
        4,
    )
    .unwrap();
    let total: f64 = rep.attractors.iter().map(|a| a.basin).sum::<f64>() + rep.unclassified_fraction();
    assert!((total - 1.0).abs() < 1e-9);
}
