use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dasim::analysis::{run_adapt, run_egt, run_evolve};
use dasim::{load_config, run_experiment, ExperimentConfig, HarnessError};
use dasim_core::market::{compute_equilibrium, Schedule};

#[derive(Parser)]
#[command(
    name = "dasim",
    about = "Double-auction market simulator",
    disable_version_flag = true
)]
struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides master_seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides reps.
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated market games.
    Run(Common),
    /// Heuristic payoff matrix, replicator dynamics and basins.
    Egt(Common),
    /// Genetic search over strategy or mechanism parameters.
    Evolve(Common),
    /// Epsilon-greedy online mechanism adaptation.
    Adapt(Common),
    /// Competitive equilibrium of a schedule.
    Equilibrium {
        #[arg(long, conflicts_with_all = ["buyers", "sellers"])]
        config: Option<PathBuf>,
        /// Comma-separated buyer values.
        #[arg(long, value_delimiter = ',', requires = "sellers")]
        buyers: Option<Vec<f64>>,
        /// Comma-separated seller values.
        #[arg(long, value_delimiter = ',', requires = "buyers")]
        sellers: Option<Vec<f64>>,
    },
    /// Print the version.
    Version,
}

fn load(c: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = load_config(&c.config)?;
    if let Some(s) = c.seed {
        cfg.master_seed = s;
    }
    if let Some(r) = c.reps {
        if r == 0 {
            return Err(HarnessError::validation("--reps", "must be at least 1"));
        }
        cfg.reps = r;
    }
    Ok(cfg)
}

fn say(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        println!("{}", msg.as_ref());
    }
}

fn fmt_mix(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn execute(cli: &Cli) -> Result<(), HarnessError> {
    let q = cli.quiet;
    match &cli.command {
        Command::Run(c) => {
            let cfg = load(c)?;
            let r = run_experiment(&cfg, &c.out)?;
            for row in r.summary.iter().filter(|r| !r.metric.contains("_day")) {
                let se = row.stderr.map(|s| format!(" ± {s:.4}")).unwrap_or_default();
                match row.mean {
                    Some(m) => say(q, format!("{:<12}{m:.4}{se}  (n={})", row.metric, row.n)),
                    None => say(q, format!("{:<12}undefined", row.metric)),
                }
            }
            if r.failures() > 0 {
                eprintln!("{} of {} replications failed; see errors.csv", r.failures(), cfg.reps);
            }
            say(q, format!("wrote {}", c.out.display()));
        }
        Command::Egt(c) => {
            let cfg = load(c)?;
            let o = run_egt(&cfg, &c.out)?;
            let labels = o.game.strategies().join(", ");
            say(q, format!("strategies: {labels}; {} profiles", o.game.profiles().len()));
            let report = |r: &dasim_core::egt::BasinReport| {
                for a in &r.attractors {
                    say(
                        q,
                        format!(
                            "attractor {} basin {:.3}{}",
                            fmt_mix(&a.mixture),
                            a.basin,
                            if a.nash.is_nash { "" } else { " (fails Nash check)" }
                        ),
                    );
                }
                if r.unclassified > 0 {
                    say(q, format!("unclassified flows: {}", r.unclassified));
                }
            };
            report(&o.report);
            if let Some((_, r)) = &o.perturbed {
                say(q, "after perturbation:");
                report(r);
            }
        }
        Command::Evolve(c) => {
            let cfg = load(c)?;
            let r = run_evolve(&cfg, &c.out)?;
            say(q, format!("best fitness {:.6}", r.best_fitness));
            say(q, format!("best genes {}", fmt_mix(&r.best.genes)));
        }
        Command::Adapt(c) => {
            let cfg = load(c)?;
            let (means, records) = run_adapt(&cfg, &c.out)?;
            let values = &cfg.adapt.as_ref().expect("checked by run_adapt").values;
            for (i, (v, m)) in values.iter().zip(&means).enumerate() {
                let pulls = records.iter().filter(|r| r.arm == i).count();
                say(q, format!("arm {i} value {v}: {pulls} pulls, mean reward {m:.4}"));
            }
        }
        Command::Equilibrium {
            config,
            buyers,
            sellers,
        } => {
            let schedule = match (config, buyers, sellers) {
                (Some(p), _, _) => load_config(p)?.timeline.base().clone(),
                (None, Some(b), Some(s)) => Schedule::new(b.clone(), s.clone())
                    .map_err(|e| HarnessError::validation("schedule", e.to_string()))?,
                _ => {
                    return Err(HarnessError::validation(
                        "equilibrium",
                        "give --config or both --buyers and --sellers",
                    ))
                }
            };
            let eq = compute_equilibrium(&schedule);
            let p0 = eq.p0.map(|p| p.to_string()).unwrap_or_else(|| "undefined".into());
            let interval = eq
                .price_interval
                .map(|(lo, hi)| format!("[{lo}, {hi}]"))
                .unwrap_or_else(|| "none".into());
            println!("q0={} p0={p0} interval={interval}", eq.q0);
        }
        Command::Version => println!("dasim {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.quiet {
            log::LevelFilter::Error
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .init();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build();
    let result = match pool {
        Ok(pool) => pool.install(|| execute(&cli)),
        Err(e) => Err(HarnessError::Runtime(e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
