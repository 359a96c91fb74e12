//! Batch replication of market games.

use std::path::Path;

use dasim_core::market::{compute_equilibrium, run_game, GameLog};
use dasim_core::metrics::MetricsReport;
use dasim_core::seed::derive_seed;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, OutputKind};
use crate::error::HarnessError;
use crate::output::{ensure_dir, num, write_text, writer};
use crate::svg::emit_svg_price_series;

/// Outcome of one replication.
#[derive(Debug, Clone)]
pub struct RepResult {
    pub run: usize,
    pub seed: u64,
    pub outcome: Result<(GameLog, MetricsReport), String>,
}

/// Mean and standard error of one metric across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub metric: String,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub reps: Vec<RepResult>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentResult {
    pub fn summary_value(&self, metric: &str) -> Option<f64> {
        self.summary.iter().find(|r| r.metric == metric).and_then(|r| r.mean)
    }

    pub fn failures(&self) -> usize {
        self.reps.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Seed of replication `run`.
pub fn rep_seed(master_seed: u64, run: usize) -> u64 {
    derive_seed(master_seed, run as u64)
}

/// Runs every replication in parallel; results come back in run order.
pub fn simulate(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    if cfg.traders.is_empty() {
        return Err(HarnessError::validation(
            "traders",
            "at least one trader entry is required",
        ));
    }
    let specs = cfg.trader_specs()?;
    let reps: Vec<RepResult> = (0..cfg.reps)
        .into_par_iter()
        .map(|run| {
            let seed = rep_seed(cfg.master_seed, run);
            let outcome = run_game(&cfg.market, &cfg.timeline, &specs, seed)
                .map_err(|e| e.to_string())
                .and_then(|log| {
                    let m = MetricsReport::compute(&log).map_err(|e| e.to_string())?;
                    Ok((log, m))
                });
            RepResult { run, seed, outcome }
        })
        .collect();
    let summary = summarise(&reps, cfg.market.days);
    Ok(ExperimentResult { reps, summary })
}

fn mean_se(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = xs.len();
    if n == 0 {
        return (None, None);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let se = if n > 1 {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Some((var / n as f64).sqrt())
    } else {
        None
    };
    (Some(mean), se)
}

fn summarise(reps: &[RepResult], days: u32) -> Vec<SummaryRow> {
    let ok: Vec<&MetricsReport> = reps
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|(_, m)| m))
        .collect();
    let mut rows = Vec::new();
    let mut push = |metric: String, f: &dyn Fn(&MetricsReport) -> Option<f64>| {
        let xs: Vec<f64> = ok.iter().filter_map(|m| f(m)).collect();
        let (mean, stderr) = mean_se(&xs);
        rows.push(SummaryRow {
            metric,
            mean,
            stderr,
            n: xs.len(),
        });
    };
    push("ea".into(), &|m| m.ea);
    push("ea_signed".into(), &|m| m.ea_signed);
    push("alpha".into(), &|m| m.alpha);
    push("dispersion".into(), &|m| Some(m.profit_dispersion));
    push("mpb".into(), &|m| m.market_power.buyers);
    push("mps".into(), &|m| m.market_power.sellers);
    push("volume".into(), &|m| Some(m.volume_by_day.iter().sum::<usize>() as f64));
    for d in 0..days as usize {
        push(format!("alpha_day{}", d + 1), &|m| {
            m.alpha_by_day.get(d).copied().flatten()
        });
        push(format!("ea_day{}", d + 1), &|m| m.days.get(d).and_then(|x| x.ea));
    }
    rows
}

/// Runs the experiment and writes its artifacts into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentResult, HarnessError> {
    let result = simulate(cfg)?;
    ensure_dir(out)?;
    if cfg.wants(OutputKind::Transactions) {
        write_transactions(&result, out)?;
    }
    if cfg.wants(OutputKind::Metrics) {
        write_metrics(&result, out)?;
        write_summary(&result, out)?;
    }
    write_errors(&result, out)?;
    if cfg.wants(OutputKind::Svg) {
        for rep in &result.reps {
            if let Ok((log, _)) = &rep.outcome {
                let p0 = compute_equilibrium(log.timeline.base()).p0;
                write_text(
                    &out.join(format!("price_series_run{}.svg", rep.run)),
                    &emit_svg_price_series(log, p0),
                )?;
            }
        }
    }
    Ok(result)
}

pub const TRANSACTION_COLUMNS: [&str; 9] = [
    "run",
    "day",
    "round",
    "seq",
    "buyer_id",
    "seller_id",
    "price",
    "buyer_value",
    "seller_value",
];

fn write_transactions(result: &ExperimentResult, out: &Path) -> Result<(), HarnessError> {
    let mut w = writer(&out.join("transactions.csv"))?;
    w.write_record(TRANSACTION_COLUMNS)?;
    for rep in &result.reps {
        let Ok((log, _)) = &rep.outcome else { continue };
        for t in log.transactions() {
            let sched = log.timeline.for_day(t.time.day);
            w.write_record([
                rep.run.to_string(),
                t.time.day.to_string(),
                t.time.round.to_string(),
                t.time.seq.to_string(),
                t.buyer().0.to_string(),
                t.seller().0.to_string(),
                t.price.to_string(),
                num(sched.value_of(t.buyer())),
                num(sched.value_of(t.seller())),
            ])?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(out.join("transactions.csv"), e))
}

fn write_metrics(result: &ExperimentResult, out: &Path) -> Result<(), HarnessError> {
    let mut w = writer(&out.join("metrics.csv"))?;
    w.write_record([
        "run_id",
        "day",
        "volume",
        "ea",
        "ea_signed",
        "alpha",
        "dispersion",
        "mpb",
        "mps",
    ])?;
    for rep in &result.reps {
        let Ok((_, m)) = &rep.outcome else { continue };
        for d in &m.days {
            w.write_record([
                rep.run.to_string(),
                d.day.to_string(),
                d.volume.to_string(),
                num(d.ea),
                num(d.ea_signed),
                num(d.alpha),
                num(Some(d.dispersion)),
                num(d.market_power.buyers),
                num(d.market_power.sellers),
            ])?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(out.join("metrics.csv"), e))
}

fn write_summary(result: &ExperimentResult, out: &Path) -> Result<(), HarnessError> {
    let mut w = writer(&out.join("summary.csv"))?;
    w.write_record(["metric", "mean", "stderr", "n"])?;
    for r in &result.summary {
        w.write_record([r.metric.clone(), num(r.mean), num(r.stderr), r.n.to_string()])?;
    }
    w.flush().map_err(|e| HarnessError::io(out.join("summary.csv"), e))
}

fn write_errors(result: &ExperimentResult, out: &Path) -> Result<(), HarnessError> {
    let mut w = writer(&out.join("errors.csv"))?;
    w.write_record(["run", "seed", "error"])?;
    for rep in &result.reps {
        if let Err(e) = &rep.outcome {
            w.write_record([rep.run.to_string(), rep.seed.to_string(), e.clone()])?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(out.join("errors.csv"), e))
}
