//! The `egt`, `evolve` and `adapt` commands.

use std::path::Path;

use dasim_core::egt::{estimate_game, find_equilibria, perturb, BasinReport, EstimationConfig, HeuristicGame};
use dasim_core::market::{MarketConfig, Pricing};
use dasim_core::optimizer::{
    adapt_mechanism, basin_fitness, ga_run, mechanism_fitness, re_space, zip_fitness, zip_space, BasinScenario,
    GaResult, MechanismParam, PullRecord, Scenario, SearchSpace,
};
use dasim_core::seed::derive_seed;

use crate::config::{EvolveTarget, ExperimentConfig, OutputKind};
use crate::error::HarnessError;
use crate::output::{ensure_dir, num, write_text, writer};
use crate::svg::emit_svg_simplex;

fn missing(section: &str) -> HarnessError {
    HarnessError::validation(section, "section is required for this command")
}

pub struct EgtOutcome {
    pub game: HeuristicGame,
    pub report: BasinReport,
    pub perturbed: Option<(HeuristicGame, BasinReport)>,
}

/// Estimates the heuristic payoff matrix, finds equilibria and basins,
/// and optionally repeats the search on a perturbed matrix.
pub fn run_egt(cfg: &ExperimentConfig, out: &Path) -> Result<EgtOutcome, HarnessError> {
    let sec = cfg.egt.as_ref().ok_or_else(|| missing("egt"))?;
    let est = EstimationConfig {
        market: cfg.market.clone(),
        timeline: cfg.timeline.clone(),
        strategies: sec.strategies.clone(),
        reps: sec.reps,
    };
    let runtime = |e: dasim_core::egt::EgtError| HarnessError::Runtime(e.to_string());
    let game = estimate_game(&est, derive_seed(cfg.master_seed, 0)).map_err(runtime)?;
    let report = find_equilibria(&game, &sec.search, derive_seed(cfg.master_seed, 1)).map_err(runtime)?;
    let perturbed = match &sec.perturb {
        Some(p) => {
            let g = perturb(&game, p.from, p.to, p.delta).map_err(runtime)?;
            let r = find_equilibria(&g, &sec.search, derive_seed(cfg.master_seed, 1)).map_err(runtime)?;
            Some((g, r))
        }
        None => None,
    };
    if cfg.wants(OutputKind::Egt) {
        ensure_dir(out)?;
        write_payoffs(&game, &out.join("payoffs.csv"))?;
        write_equilibria(&game, &report, &out.join("equilibria.csv"))?;
        write_flows(&game, &report, &out.join("flows.csv"))?;
        if let Some((g, r)) = &perturbed {
            write_payoffs(g, &out.join("payoffs_perturbed.csv"))?;
            write_equilibria(g, r, &out.join("equilibria_perturbed.csv"))?;
        }
    }
    if cfg.wants(OutputKind::Svg) && game.num_strategies() == 3 {
        ensure_dir(out)?;
        write_text(&out.join("simplex.svg"), &emit_svg_simplex(&report, game.strategies()))?;
        if let Some((g, r)) = &perturbed {
            write_text(&out.join("simplex_perturbed.svg"), &emit_svg_simplex(r, g.strategies()))?;
        }
    }
    Ok(EgtOutcome {
        game,
        report,
        perturbed,
    })
}

fn write_payoffs(game: &HeuristicGame, path: &Path) -> Result<(), HarnessError> {
    let labels = game.strategies();
    let mut w = writer(path)?;
    let mut head: Vec<String> = labels.iter().map(|l| format!("n_{l}")).collect();
    head.extend(labels.iter().map(|l| format!("mean_{l}")));
    head.extend(labels.iter().map(|l| format!("stderr_{l}")));
    head.push("reps".into());
    w.write_record(&head)?;
    for (p, profile) in game.profiles().iter().enumerate() {
        let entries = game.entries(p);
        let mut row: Vec<String> = profile.iter().map(|c| c.to_string()).collect();
        row.extend(entries.iter().map(|e| num(e.map(|e| e.mean))));
        row.extend(entries.iter().map(|e| num(e.map(|e| e.stderr()))));
        row.push(
            entries
                .iter()
                .flatten()
                .map(|e| e.samples)
                .max()
                .unwrap_or(0)
                .to_string(),
        );
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn write_equilibria(game: &HeuristicGame, report: &BasinReport, path: &Path) -> Result<(), HarnessError> {
    let labels = game.strategies();
    let mut w = writer(path)?;
    let mut head = vec!["attractor".to_string()];
    head.extend(labels.iter().map(|l| format!("x_{l}")));
    head.extend(["basin", "starts", "nash"].map(String::from));
    head.extend(labels.iter().map(|l| format!("u_{l}")));
    w.write_record(&head)?;
    for (i, a) in report.attractors.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(a.mixture.iter().map(|x| x.to_string()));
        row.extend([a.basin.to_string(), a.starts.to_string(), a.nash.is_nash.to_string()]);
        row.extend(a.nash.payoffs.iter().map(|u| u.to_string()));
        w.write_record(&row)?;
    }
    if report.unclassified > 0 {
        let mut row = vec!["unclassified".to_string()];
        row.extend(labels.iter().map(|_| String::new()));
        row.extend([
            report.unclassified_fraction().to_string(),
            report.unclassified.to_string(),
            String::new(),
        ]);
        row.extend(labels.iter().map(|_| String::new()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn write_flows(game: &HeuristicGame, report: &BasinReport, path: &Path) -> Result<(), HarnessError> {
    let mut w = writer(path)?;
    let mut head = vec!["flow".to_string(), "point".to_string()];
    head.extend(game.strategies().iter().map(|l| format!("x_{l}")));
    head.push("attractor".into());
    w.write_record(&head)?;
    for (f, flow) in report.flows.iter().enumerate() {
        let attractor = flow.classified_attractor.map(|a| a.to_string()).unwrap_or_default();
        for (k, x) in flow.trajectory.iter().enumerate() {
            let mut row = vec![f.to_string(), k.to_string()];
            row.extend(x.iter().map(|v| v.to_string()));
            row.push(attractor.clone());
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Gene names of an evolution target.
pub fn gene_names(target: EvolveTarget) -> Vec<&'static str> {
    match target {
        EvolveTarget::Zip => vec![
            "beta_lo",
            "beta_hi",
            "gamma_lo",
            "gamma_hi",
            "margin_lo",
            "margin_hi",
            "ca",
            "cr",
        ],
        EvolveTarget::Qs => vec!["qs"],
        EvolveTarget::K => vec!["k"],
        EvolveTarget::ReBasin => vec!["recency", "experimentation", "max_margin"],
    }
}

/// Runs the genetic algorithm on the configured target.
pub fn run_evolve(cfg: &ExperimentConfig, out: &Path) -> Result<GaResult, HarnessError> {
    let sec = cfg.evolve.as_ref().ok_or_else(|| missing("evolve"))?;
    let scenario = |traders| Scenario {
        market: cfg.market.clone(),
        timeline: cfg.timeline.clone(),
        traders,
        reps: sec.ga.fitness_reps,
        objective: sec.objective,
    };
    let unit = SearchSpace::new(vec![(0.0, 1.0)]).expect("valid bounds");
    let ga_err = |e: dasim_core::optimizer::OptimizerError| HarnessError::Runtime(e.to_string());
    let seed = cfg.master_seed;
    // Fitness errors cannot occur once the configuration is validated; a
    // failed evaluation would score as the worst possible fitness.
    let result = match sec.target {
        EvolveTarget::Zip => {
            let sc = scenario(Vec::new());
            ga_run(
                &sec.ga,
                &zip_space(),
                |g, s| zip_fitness(g, &sc, s).unwrap_or(f64::NEG_INFINITY),
                seed,
            )
        }
        EvolveTarget::Qs | EvolveTarget::K => {
            if cfg.traders.is_empty() {
                return Err(HarnessError::validation("traders", "required for mechanism evolution"));
            }
            let sc = scenario(cfg.trader_specs()?);
            let param = if sec.target == EvolveTarget::Qs {
                MechanismParam::Qs
            } else {
                MechanismParam::K
            };
            ga_run(
                &sec.ga,
                &unit,
                |g, s| mechanism_fitness(param, g[0], &sc, s).unwrap_or(f64::NEG_INFINITY),
                seed,
            )
        }
        EvolveTarget::ReBasin => {
            let mut search = cfg.egt.as_ref().map(|e| e.search).unwrap_or_default();
            search.n_starts = sec.n_starts;
            let sc = BasinScenario {
                market: cfg.market.clone(),
                timeline: cfg.timeline.clone(),
                rivals: sec.rivals.clone(),
                reps: sec.egt_reps,
                search,
            };
            ga_run(
                &sec.ga,
                &re_space(),
                |g, s| basin_fitness(g, &sc, s).unwrap_or(f64::NEG_INFINITY),
                seed,
            )
        }
    }
    .map_err(ga_err)?;

    if cfg.wants(OutputKind::Evolution) {
        ensure_dir(out)?;
        let path = out.join("evolution.csv");
        let mut w = writer(&path)?;
        let mut head: Vec<String> = ["generation", "best_fitness", "mean_fitness", "best_ever_fitness"]
            .map(String::from)
            .to_vec();
        head.extend(gene_names(sec.target).iter().map(|g| format!("gene_{g}")));
        w.write_record(&head)?;
        for t in &result.trace {
            let mut row = vec![
                t.generation.to_string(),
                t.best_fitness.to_string(),
                t.mean_fitness.to_string(),
                t.best_ever_fitness.to_string(),
            ];
            row.extend(t.best_genes.iter().map(|g| g.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(result)
}

/// Runs the epsilon-greedy mechanism adaptation loop.
pub fn run_adapt(cfg: &ExperimentConfig, out: &Path) -> Result<(Vec<f64>, Vec<PullRecord>), HarnessError> {
    let sec = cfg.adapt.as_ref().ok_or_else(|| missing("adapt"))?;
    if cfg.traders.is_empty() {
        return Err(HarnessError::validation("traders", "required for adaptation"));
    }
    let arms: Vec<MarketConfig> = sec
        .values
        .iter()
        .map(|&v| {
            let mut m = cfg.market.clone();
            match sec.param {
                MechanismParam::Qs => m.qs = v,
                MechanismParam::K => m.pricing = Pricing::Kda { k: v },
            }
            m
        })
        .collect();
    let (state, records) = adapt_mechanism(
        arms,
        sec.epsilon,
        &cfg.timeline,
        &cfg.trader_specs()?,
        sec.objective,
        sec.pulls,
        cfg.master_seed,
    )
    .map_err(|e| HarnessError::Runtime(e.to_string()))?;
    if cfg.wants(OutputKind::Evolution) {
        ensure_dir(out)?;
        let path = out.join("bandit.csv");
        let mut w = writer(&path)?;
        w.write_record(["pull", "arm", "reward", "running_mean"])?;
        for r in &records {
            w.write_record([
                r.pull.to_string(),
                r.arm.to_string(),
                r.reward.to_string(),
                r.running_mean.to_string(),
            ])?;
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok((state.means, records))
}
