//! Experiment configuration files.
//!
//! A config is a TOML document. Every section is optional except where a
//! subcommand needs it; unknown keys are rejected. See `configs/` for
//! annotated examples.

use dasim_core::egt::{EquilibriumSearch, FlowConfig};
use dasim_core::market::{ClearingMode, MarketConfig, Pricing, Schedule, ScheduleTimeline};
use dasim_core::optimizer::{GaConfig, MechanismParam, Objective};
use dasim_core::strategy::{GdParams, KaplanParams, ReParams, StrategySpec, ZipParams};
use serde::Deserialize;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Transactions,
    Metrics,
    Evolution,
    Egt,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideSel {
    Buy,
    Sell,
    #[default]
    Both,
}

/// One line of the trader list: `count` traders on each selected side.
#[derive(Debug, Clone, PartialEq)]
pub struct TraderEntry {
    pub label: String,
    pub spec: StrategySpec,
    pub count: usize,
    pub side: SideSel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub from: usize,
    pub to: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EgtSection {
    pub strategies: Vec<(String, StrategySpec)>,
    pub reps: usize,
    pub search: EquilibriumSearch,
    pub perturb: Option<Perturbation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolveTarget {
    /// ZIP's eight learning parameters.
    Zip,
    /// The seller-shout probability.
    Qs,
    /// The k-DA pricing parameter.
    K,
    /// Roth–Erev parameters scored by basin size.
    ReBasin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSection {
    pub target: EvolveTarget,
    pub objective: Objective,
    pub ga: GaConfig,
    pub rivals: Vec<(String, StrategySpec)>,
    pub egt_reps: usize,
    pub n_starts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptSection {
    pub param: MechanismParam,
    pub values: Vec<f64>,
    pub epsilon: f64,
    pub pulls: usize,
    pub objective: Objective,
}

/// A fully validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub market: MarketConfig,
    pub timeline: ScheduleTimeline,
    pub traders: Vec<TraderEntry>,
    pub reps: usize,
    pub master_seed: u64,
    pub outputs: Vec<OutputKind>,
    pub egt: Option<EgtSection>,
    pub evolve: Option<EvolveSection>,
    pub adapt: Option<AdaptSection>,
}

impl ExperimentConfig {
    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Strategy of every trader, buyers first, in schedule order.
    pub fn trader_specs(&self) -> Result<Vec<StrategySpec>, HarnessError> {
        trader_specs(&self.traders, self.timeline.base())
    }
}

fn trader_specs(traders: &[TraderEntry], schedule: &Schedule) -> Result<Vec<StrategySpec>, HarnessError> {
    let mut buyers = Vec::new();
    let mut sellers = Vec::new();
    for t in traders {
        if t.side != SideSel::Sell {
            buyers.extend(std::iter::repeat_n(t.spec.clone(), t.count));
        }
        if t.side != SideSel::Buy {
            sellers.extend(std::iter::repeat_n(t.spec.clone(), t.count));
        }
    }
    if buyers.len() != schedule.num_buyers() || sellers.len() != schedule.num_sellers() {
        return Err(HarnessError::validation(
            "traders",
            format!(
                "{} buyers and {} sellers configured but the schedule has {} and {}",
                buyers.len(),
                sellers.len(),
                schedule.num_buyers(),
                schedule.num_sellers()
            ),
        ));
    }
    buyers.extend(sellers);
    Ok(buyers)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    master_seed: Option<u64>,
    reps: Option<usize>,
    outputs: Option<Vec<OutputKind>>,
    #[serde(default)]
    market: RawMarket,
    schedule: Option<RawSchedule>,
    #[serde(default)]
    traders: Vec<RawTrader>,
    egt: Option<RawEgt>,
    evolve: Option<RawEvolve>,
    adapt: Option<RawAdapt>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawClearing {
    Continuous,
    Periodic,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawPricing {
    Kda,
    Uniform,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    clearing: Option<RawClearing>,
    rounds_per_clear: Option<u32>,
    improvement_rule: Option<bool>,
    pricing: Option<RawPricing>,
    k: Option<f64>,
    ku: Option<f64>,
    qs: Option<f64>,
    days: Option<u32>,
    rounds_per_day: Option<u32>,
    min_price: Option<f64>,
    max_price: Option<f64>,
    persistent_shouts: Option<bool>,
    tick: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ScheduleKind {
    Values,
    #[default]
    Linear,
    FlatSupply,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(default)]
    kind: ScheduleKind,
    day: Option<u32>,
    buyers: Option<Vec<f64>>,
    sellers: Option<Vec<f64>>,
    n_per_side: Option<usize>,
    n_buyers: Option<usize>,
    n_sellers: Option<usize>,
    buyer_intercept: Option<f64>,
    buyer_slope: Option<f64>,
    seller_intercept: Option<f64>,
    seller_slope: Option<f64>,
    supply_price: Option<f64>,
    units: Option<u32>,
    #[serde(default)]
    shifts: Vec<RawSchedule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrader {
    strategy: String,
    label: Option<String>,
    count: Option<usize>,
    #[serde(default)]
    side: SideSel,
    params: Option<toml::Table>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    strategy: String,
    label: Option<String>,
    params: Option<toml::Table>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturb {
    from: String,
    to: String,
    delta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEgt {
    strategies: Vec<RawStrategy>,
    reps: Option<usize>,
    n_starts: Option<usize>,
    #[serde(default)]
    flow: FlowConfig,
    cluster_tol: Option<f64>,
    support_tol: Option<f64>,
    perturb: Option<RawPerturb>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvolve {
    target: EvolveTarget,
    objective: Option<Objective>,
    #[serde(default)]
    ga: GaConfig,
    #[serde(default)]
    rivals: Vec<RawStrategy>,
    egt_reps: Option<usize>,
    n_starts: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdapt {
    param: MechanismParam,
    values: Vec<f64>,
    epsilon: Option<f64>,
    pulls: Option<usize>,
    objective: Option<Objective>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().trim().to_string(),
    })?;
    resolve(raw)
}

pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text)
}

fn unit_interval(path: &str, v: f64) -> Result<f64, HarnessError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(HarnessError::validation(
            path,
            format!("{v} is outside the range [0, 1]"),
        ))
    }
}

fn positive(path: &str, v: usize) -> Result<usize, HarnessError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(HarnessError::validation(path, "must be at least 1"))
    }
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig, HarnessError> {
    let market = resolve_market(&raw.market)?;
    let timeline = match &raw.schedule {
        Some(s) => resolve_timeline(s)?,
        None => smith_style_schedule().into(),
    };
    let traders = raw
        .traders
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let path = format!("traders[{i}]");
            let spec = strategy_spec(&t.strategy, t.params.as_ref(), &path)?;
            Ok(TraderEntry {
                label: t.label.clone().unwrap_or_else(|| t.strategy.clone()),
                spec,
                count: t.count.unwrap_or(1),
                side: t.side,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    if !traders.is_empty() {
        trader_specs(&traders, timeline.base())?;
    }
    let reps = positive("reps", raw.reps.unwrap_or(1))?;
    let egt = raw.egt.as_ref().map(resolve_egt).transpose()?;
    let evolve = raw.evolve.as_ref().map(resolve_evolve).transpose()?;
    let adapt = raw.adapt.as_ref().map(resolve_adapt).transpose()?;
    Ok(ExperimentConfig {
        market,
        timeline,
        traders,
        reps,
        master_seed: raw.master_seed.unwrap_or(0),
        outputs: raw.outputs.unwrap_or_else(|| {
            vec![
                OutputKind::Transactions,
                OutputKind::Metrics,
                OutputKind::Evolution,
                OutputKind::Egt,
                OutputKind::Svg,
            ]
        }),
        egt,
        evolve,
        adapt,
    })
}

fn resolve_market(m: &RawMarket) -> Result<MarketConfig, HarnessError> {
    let d = MarketConfig::default();
    let clearing_mode = match m.clearing.unwrap_or(RawClearing::Continuous) {
        RawClearing::Continuous => {
            if m.rounds_per_clear.is_some() {
                return Err(HarnessError::validation(
                    "market.rounds_per_clear",
                    "only valid with clearing = \"periodic\"",
                ));
            }
            ClearingMode::Continuous
        }
        RawClearing::Periodic => ClearingMode::Periodic {
            rounds_per_clear: m.rounds_per_clear.unwrap_or(1),
        },
    };
    let pricing = match m.pricing.unwrap_or(RawPricing::Kda) {
        RawPricing::Kda => {
            if m.ku.is_some() {
                return Err(HarnessError::validation(
                    "market.ku",
                    "only valid with pricing = \"uniform\"",
                ));
            }
            Pricing::Kda {
                k: unit_interval("market.k", m.k.unwrap_or(0.5))?,
            }
        }
        RawPricing::Uniform => {
            if m.k.is_some() {
                return Err(HarnessError::validation(
                    "market.k",
                    "only valid with pricing = \"kda\"",
                ));
            }
            Pricing::Uniform {
                ku: unit_interval("market.ku", m.ku.unwrap_or(0.5))?,
            }
        }
    };
    let cfg = MarketConfig {
        clearing_mode,
        improvement_rule: m.improvement_rule.unwrap_or(d.improvement_rule),
        pricing,
        qs: unit_interval("market.qs", m.qs.unwrap_or(d.qs))?,
        days: m.days.unwrap_or(d.days),
        rounds_per_day: m.rounds_per_day.unwrap_or(d.rounds_per_day),
        min_price: m.min_price.unwrap_or(d.min_price),
        max_price: m.max_price.unwrap_or(d.max_price),
        persistent_shouts: m.persistent_shouts.unwrap_or(d.persistent_shouts),
        tick: m.tick.or(d.tick),
    };
    cfg.validate()
        .map_err(|e| HarnessError::validation("market", e.to_string()))?;
    Ok(cfg)
}

/// Ten buyers valued 150 down to 60 and ten sellers from 50 up to 140,
/// giving a symmetric market with p0 = 100 and q0 = 5.
pub fn smith_style_schedule() -> Schedule {
    Schedule::new(
        (0..10).map(|i| 150.0 - 10.0 * i as f64).collect(),
        (0..10).map(|i| 50.0 + 10.0 * i as f64).collect(),
    )
    .expect("static schedule is valid")
}

fn resolve_schedule(s: &RawSchedule, path: &str) -> Result<Schedule, HarnessError> {
    let n = s.n_per_side.unwrap_or(10);
    let nb = s.n_buyers.unwrap_or(n);
    let ns = s.n_sellers.unwrap_or(n);
    let line = |intercept: f64, slope: f64, count: usize| -> Vec<f64> {
        (0..count).map(|i| intercept + slope * i as f64).collect()
    };
    let demand = || line(s.buyer_intercept.unwrap_or(150.0), -s.buyer_slope.unwrap_or(10.0), nb);
    let (buyers, sellers) =
        match s.kind {
            ScheduleKind::Values => {
                let b = s.buyers.clone().ok_or_else(|| {
                    HarnessError::validation(format!("{path}.buyers"), "required for kind = \"values\"")
                })?;
                let v = s.sellers.clone().ok_or_else(|| {
                    HarnessError::validation(format!("{path}.sellers"), "required for kind = \"values\"")
                })?;
                (b, v)
            }
            ScheduleKind::Linear => (
                demand(),
                line(s.seller_intercept.unwrap_or(50.0), s.seller_slope.unwrap_or(10.0), ns),
            ),
            ScheduleKind::FlatSupply => (demand(), vec![s.supply_price.unwrap_or(100.0); ns]),
        };
    if !matches!(s.kind, ScheduleKind::Values) && (s.buyers.is_some() || s.sellers.is_some()) {
        return Err(HarnessError::validation(
            format!("{path}.buyers"),
            "explicit values need kind = \"values\"",
        ));
    }
    Schedule::with_units(buyers, sellers, s.units.unwrap_or(1))
        .map_err(|e| HarnessError::validation(path, e.to_string()))
}

fn resolve_timeline(s: &RawSchedule) -> Result<ScheduleTimeline, HarnessError> {
    if s.day.is_some() {
        return Err(HarnessError::validation(
            "schedule.day",
            "only valid inside schedule.shifts",
        ));
    }
    let base = resolve_schedule(s, "schedule")?;
    let mut shifts = Vec::with_capacity(s.shifts.len());
    for (i, sh) in s.shifts.iter().enumerate() {
        let path = format!("schedule.shifts[{i}]");
        let day = sh
            .day
            .ok_or_else(|| HarnessError::validation(format!("{path}.day"), "required"))?;
        if !sh.shifts.is_empty() {
            return Err(HarnessError::validation(format!("{path}.shifts"), "shifts cannot nest"));
        }
        shifts.push((day, resolve_schedule(sh, &path)?));
    }
    ScheduleTimeline::new(base, shifts).map_err(|e| HarnessError::validation("schedule.shifts", e.to_string()))
}

/// Builds a strategy from its short name and optional parameter table.
pub fn strategy_spec(name: &str, params: Option<&toml::Table>, path: &str) -> Result<StrategySpec, HarnessError> {
    fn decode<T: serde::de::DeserializeOwned + Default>(
        p: Option<&toml::Table>,
        path: &str,
    ) -> Result<T, HarnessError> {
        match p {
            None => Ok(T::default()),
            Some(t) => t
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| HarnessError::validation(format!("{path}.params"), e.message().trim())),
        }
    }
    let spec = match name {
        "tt" | "ziu" | "zic" => {
            if params.is_some_and(|t| !t.is_empty()) {
                return Err(HarnessError::validation(
                    format!("{path}.params"),
                    format!("strategy \"{name}\" takes no parameters"),
                ));
            }
            StrategySpec::from_name(name).expect("known name")
        }
        "zip" => {
            let p: ZipParams = decode(params, path)?;
            for (field, [lo, hi]) in [("beta", p.beta), ("gamma", p.gamma), ("margin", p.margin)] {
                if !(lo <= hi) {
                    return Err(HarnessError::validation(
                        format!("{path}.params.{field}"),
                        "lower bound exceeds upper bound",
                    ));
                }
            }
            StrategySpec::Zip(p)
        }
        "re" => {
            let p: ReParams = decode(params, path)?;
            if p.bins == 0 {
                return Err(HarnessError::validation(
                    format!("{path}.params.bins"),
                    "must be at least 1",
                ));
            }
            StrategySpec::Re(p)
        }
        "gd" => {
            let p: GdParams = decode(params, path)?;
            StrategySpec::Gd(p)
        }
        "kaplan" => StrategySpec::Kaplan(decode::<KaplanParams>(params, path)?),
        other => {
            return Err(HarnessError::validation(
                format!("{path}.strategy"),
                format!("unknown strategy \"{other}\" (expected tt, ziu, zic, zip, re, gd or kaplan)"),
            ))
        }
    };
    Ok(spec)
}

fn labelled(list: &[RawStrategy], path: &str) -> Result<Vec<(String, StrategySpec)>, HarnessError> {
    let out = list
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = format!("{path}[{i}]");
            Ok((
                s.label.clone().unwrap_or_else(|| s.strategy.clone()),
                strategy_spec(&s.strategy, s.params.as_ref(), &p)?,
            ))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    for (i, (a, _)) in out.iter().enumerate() {
        if out[..i].iter().any(|(b, _)| a == b) {
            return Err(HarnessError::validation(
                format!("{path}[{i}].label"),
                format!("duplicate label \"{a}\""),
            ));
        }
    }
    Ok(out)
}

fn resolve_egt(e: &RawEgt) -> Result<EgtSection, HarnessError> {
    let strategies = labelled(&e.strategies, "egt.strategies")?;
    if strategies.is_empty() {
        return Err(HarnessError::validation(
            "egt.strategies",
            "at least one strategy is required",
        ));
    }
    let d = EquilibriumSearch::default();
    let search = EquilibriumSearch {
        n_starts: positive("egt.n_starts", e.n_starts.unwrap_or(d.n_starts))?,
        flow: e.flow,
        cluster_tol: e.cluster_tol.unwrap_or(d.cluster_tol),
        support_tol: e.support_tol.unwrap_or(d.support_tol),
    };
    if !(search.flow.dt > 0.0) {
        return Err(HarnessError::validation("egt.flow.dt", "must be positive"));
    }
    let perturb = e
        .perturb
        .as_ref()
        .map(|p| {
            let find = |label: &str, field: &str| {
                strategies.iter().position(|(l, _)| l == label).ok_or_else(|| {
                    HarnessError::validation(
                        format!("egt.perturb.{field}"),
                        format!("no strategy labelled \"{label}\""),
                    )
                })
            };
            if !(p.delta >= 0.0) {
                return Err(HarnessError::validation("egt.perturb.delta", "must be non-negative"));
            }
            Ok(Perturbation {
                from: find(&p.from, "from")?,
                to: find(&p.to, "to")?,
                delta: p.delta,
            })
        })
        .transpose()?;
    Ok(EgtSection {
        strategies,
        reps: positive("egt.reps", e.reps.unwrap_or(100))?,
        search,
        perturb,
    })
}

fn resolve_evolve(e: &RawEvolve) -> Result<EvolveSection, HarnessError> {
    e.ga.validate()
        .map_err(|err| HarnessError::validation("evolve.ga", err.to_string()))?;
    let rivals = labelled(&e.rivals, "evolve.rivals")?;
    if e.target != EvolveTarget::ReBasin && !rivals.is_empty() {
        return Err(HarnessError::validation(
            "evolve.rivals",
            "only used with target = \"re_basin\"",
        ));
    }
    Ok(EvolveSection {
        target: e.target,
        objective: e.objective.unwrap_or_default(),
        ga: e.ga,
        rivals,
        egt_reps: positive("evolve.egt_reps", e.egt_reps.unwrap_or(20))?,
        n_starts: positive("evolve.n_starts", e.n_starts.unwrap_or(100))?,
    })
}

fn resolve_adapt(a: &RawAdapt) -> Result<AdaptSection, HarnessError> {
    if a.values.is_empty() {
        return Err(HarnessError::validation("adapt.values", "at least one arm is required"));
    }
    for (i, &v) in a.values.iter().enumerate() {
        unit_interval(&format!("adapt.values[{i}]"), v)?;
    }
    Ok(AdaptSection {
        param: a.param,
        values: a.values.clone(),
        epsilon: unit_interval("adapt.epsilon", a.epsilon.unwrap_or(0.1))?,
        pulls: positive("adapt.pulls", a.pulls.unwrap_or(1000))?,
        objective: a.objective.unwrap_or(Objective::Efficiency),
    })
}
