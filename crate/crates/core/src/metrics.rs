//! Market performance measures: actual and equilibrium profit, allocative
//! efficiency, Smith's convergence coefficient, profit dispersion and
//! market power.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::{compute_equilibrium, GameLog, Schedule, ScheduleTimeline, Side, TraderId, Transaction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("transaction references unknown trader {0}")]
    UnknownTrader(TraderId),
    #[error("no transactions")]
    NoTrades,
    #[error("equilibrium price undefined or not positive")]
    P0Undefined,
    #[error("length mismatch: {actual} actual vs {equilibrium} equilibrium profits")]
    LengthMismatch { actual: usize, equilibrium: usize },
}

fn value(schedule: &Schedule, id: TraderId) -> Result<f64, MetricsError> {
    schedule.value_of(id).ok_or(MetricsError::UnknownTrader(id))
}

/// Sum of `|v − p|` over both counterparties of every transaction.
pub fn actual_profit<'a>(
    trades: impl IntoIterator<Item = &'a Transaction>,
    schedule: &Schedule,
) -> Result<f64, MetricsError> {
    let mut total = 0.0;
    for t in trades {
        total += (value(schedule, t.buyer())? - t.price).abs();
        total += (value(schedule, t.seller())? - t.price).abs();
    }
    Ok(total)
}

/// Signed trading profit of each trader, indexed by trader id.
pub fn trader_profits<'a>(
    trades: impl IntoIterator<Item = &'a Transaction>,
    schedule: &Schedule,
) -> Result<Vec<f64>, MetricsError> {
    let mut profits = vec![0.0; schedule.num_traders()];
    for t in trades {
        let (b, s) = (t.buyer(), t.seller());
        let vb = value(schedule, b)?;
        let vs = value(schedule, s)?;
        profits[b.0] += vb - t.price;
        profits[s.0] += t.price - vs;
    }
    Ok(profits)
}

/// Equilibrium profit split by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfit {
    pub total: f64,
    pub buyers: f64,
    pub sellers: f64,
    /// `None` when the schedule has no crossing, in which case all profits
    /// are zero and efficiency is undefined.
    pub p0: Option<f64>,
}

/// Each trader's profit if every unit traded at `p0`: `|v − p0|` per unit
/// for traders at least as competitive as `p0`, zero otherwise. Traders
/// exactly at `p0` are included and contribute zero.
pub fn equilibrium_trader_profits(schedule: &Schedule) -> Vec<f64> {
    let units = schedule.units_per_trader_per_day as f64;
    match compute_equilibrium(schedule).p0 {
        None => vec![0.0; schedule.num_traders()],
        Some(p0) => schedule
            .traders()
            .map(|(_, side, v)| match side {
                Side::Buy if v >= p0 => (v - p0) * units,
                Side::Sell if v <= p0 => (p0 - v) * units,
                _ => 0.0,
            })
            .collect(),
    }
}

pub fn equilibrium_profit(schedule: &Schedule) -> EquilibriumProfit {
    let p0 = compute_equilibrium(schedule).p0;
    let per_trader = equilibrium_trader_profits(schedule);
    let nb = schedule.num_buyers();
    let buyers: f64 = per_trader[..nb].iter().sum();
    let sellers: f64 = per_trader[nb..].iter().sum();
    EquilibriumProfit {
        total: buyers + sellers,
        buyers,
        sellers,
        p0,
    }
}

/// `100·pa/pe`; `None` when `pe` is not positive.
pub fn allocative_efficiency(pa: f64, pe: f64) -> Option<f64> {
    (pe > 0.0).then(|| 100.0 * pa / pe)
}

/// Smith's coefficient: RMS deviation of prices from `p0`, as a percentage
/// of `p0`.
pub fn convergence_alpha(prices: &[f64], p0: Option<f64>) -> Result<f64, MetricsError> {
    let p0 = p0.filter(|&p| p > 0.0).ok_or(MetricsError::P0Undefined)?;
    if prices.is_empty() {
        return Err(MetricsError::NoTrades);
    }
    let mse = prices.iter().map(|p| (p - p0).powi(2)).sum::<f64>() / prices.len() as f64;
    Ok(100.0 / p0 * mse.sqrt())
}

/// RMS difference between actual and equilibrium per-trader profits.
pub fn profit_dispersion(actual: &[f64], equilibrium: &[f64]) -> Result<f64, MetricsError> {
    if actual.len() != equilibrium.len() {
        return Err(MetricsError::LengthMismatch {
            actual: actual.len(),
            equilibrium: equilibrium.len(),
        });
    }
    if actual.is_empty() {
        return Ok(0.0);
    }
    let ss: f64 = actual.iter().zip(equilibrium).map(|(a, e)| (a - e).powi(2)).sum();
    Ok((ss / actual.len() as f64).sqrt())
}

/// Relative excess of each side's signed profit over its equilibrium
/// profit: `(Pa_side − Pe_side)/Pe_side`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketPower {
    pub buyers: Option<f64>,
    pub sellers: Option<f64>,
}

fn side_power(actual: f64, equilibrium: f64) -> Option<f64> {
    (equilibrium > 0.0).then(|| (actual - equilibrium) / equilibrium)
}

pub fn market_power<'a>(
    trades: impl IntoIterator<Item = &'a Transaction>,
    schedule: &Schedule,
) -> Result<MarketPower, MetricsError> {
    let profits = trader_profits(trades, schedule)?;
    let eq = equilibrium_profit(schedule);
    let nb = schedule.num_buyers();
    Ok(MarketPower {
        buyers: side_power(profits[..nb].iter().sum(), eq.buyers),
        sellers: side_power(profits[nb..].iter().sum(), eq.sellers),
    })
}

/// Metrics of one trading day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayMetrics {
    pub day: u32,
    pub volume: usize,
    pub pa: f64,
    pub pa_signed: f64,
    pub pe: f64,
    pub ea: Option<f64>,
    pub ea_signed: Option<f64>,
    pub alpha: Option<f64>,
    pub dispersion: f64,
    pub market_power: MarketPower,
    pub p0: Option<f64>,
}

/// Whole-game metrics.
///
/// `ea` follows the absolute-value actual profit; with loss-making trades it
/// can exceed 100, so the signed variant `ea_signed` is reported alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub pa: f64,
    pub pa_signed: f64,
    pub pa_buyers: f64,
    pub pa_sellers: f64,
    pub pe: f64,
    pub ea: Option<f64>,
    pub ea_signed: Option<f64>,
    /// RMS relative price deviation over all trades of the game, in percent.
    pub alpha: Option<f64>,
    pub alpha_by_day: Vec<Option<f64>>,
    /// RMS over every (trader, day) of actual minus equilibrium profit.
    pub profit_dispersion: f64,
    pub market_power: MarketPower,
    pub volume_by_day: Vec<usize>,
    pub days: Vec<DayMetrics>,
}

impl MetricsReport {
    pub fn compute(log: &GameLog) -> Result<Self, MetricsError> {
        Self::compute_with(log, &log.timeline)
    }

    pub fn compute_with(log: &GameLog, timeline: &ScheduleTimeline) -> Result<Self, MetricsError> {
        let by_day = log.transactions_by_day();
        let mut days = Vec::with_capacity(by_day.len());
        let (mut pa_b, mut pa_s, mut pe_b, mut pe_s) = (0.0, 0.0, 0.0, 0.0);
        let mut pa_abs = 0.0;
        let mut rel_sq = 0.0;
        let mut n_priced = 0usize;
        let mut disp_ss = 0.0;
        let mut disp_n = 0usize;

        for (d, trades) in by_day.iter().enumerate() {
            let schedule = timeline.for_day(d as u32);
            let nb = schedule.num_buyers();
            let profits = trader_profits(trades.iter().copied(), schedule)?;
            let eq_profits = equilibrium_trader_profits(schedule);
            let eq = equilibrium_profit(schedule);
            let pa = actual_profit(trades.iter().copied(), schedule)?;
            let buyers: f64 = profits[..nb].iter().sum();
            let sellers: f64 = profits[nb..].iter().sum();
            let prices: Vec<f64> = trades.iter().map(|t| t.price).collect();
            let alpha = convergence_alpha(&prices, eq.p0).ok();
            if let Some(p0) = eq.p0.filter(|&p| p > 0.0) {
                rel_sq += prices.iter().map(|p| ((p - p0) / p0).powi(2)).sum::<f64>();
                n_priced += prices.len();
            }
            let dispersion = profit_dispersion(&profits, &eq_profits)?;
            disp_ss += dispersion.powi(2) * profits.len() as f64;
            disp_n += profits.len();

            pa_abs += pa;
            pa_b += buyers;
            pa_s += sellers;
            pe_b += eq.buyers;
            pe_s += eq.sellers;
            days.push(DayMetrics {
                day: d as u32,
                volume: trades.len(),
                pa,
                pa_signed: buyers + sellers,
                pe: eq.total,
                ea: allocative_efficiency(pa, eq.total),
                ea_signed: allocative_efficiency(buyers + sellers, eq.total),
                alpha,
                dispersion,
                market_power: MarketPower {
                    buyers: side_power(buyers, eq.buyers),
                    sellers: side_power(sellers, eq.sellers),
                },
                p0: eq.p0,
            });
        }
        let pe = pe_b + pe_s;
        Ok(MetricsReport {
            pa: pa_abs,
            pa_signed: pa_b + pa_s,
            pa_buyers: pa_b,
            pa_sellers: pa_s,
            pe,
            ea: allocative_efficiency(pa_abs, pe),
            ea_signed: allocative_efficiency(pa_b + pa_s, pe),
            alpha: (n_priced > 0).then(|| 100.0 * (rel_sq / n_priced as f64).sqrt()),
            alpha_by_day: days.iter().map(|d| d.alpha).collect(),
            profit_dispersion: if disp_n > 0 {
                (disp_ss / disp_n as f64).sqrt()
            } else {
                0.0
            },
            market_power: MarketPower {
                buyers: side_power(pa_b, pe_b),
                sellers: side_power(pa_s, pe_s),
            },
            volume_by_day: days.iter().map(|d| d.volume).collect(),
            days,
        })
    }
}
