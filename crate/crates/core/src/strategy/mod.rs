//! Trading strategies.
//!
//! A strategy sees the market only through a [`TraderContext`] and draws
//! randomness only from the trader's own RNG stream, so its behaviour is a
//! pure function of (state, context, stream).

mod gd;
mod kaplan;
mod re;
mod truthful;
mod zi;
mod zip;

pub use gd::{gd_belief, gd_grid, gd_shout, Belief, Gd, GdParams};
pub use kaplan::{kaplan_shout, Kaplan, KaplanParams};
pub use re::{Re, ReParams, ReState};
pub use truthful::{tt_shout, Truthful};
pub use zi::{zi_c_shout, zi_u_shout, ZiC, ZiU};
pub use zip::{zip_shout, Adjustment, Zip, ZipParams, ZipState};

use serde::{Deserialize, Serialize};

use crate::market::{MarketEvent, Quote, ShoutRecord, Side, TraderId};
use crate::seed::SimRng;

/// Outcome of the trader's most recent shout this day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OwnResult {
    None,
    Traded(f64),
    Rejected,
    Stood,
}

/// Everything a trader may observe when deciding.
#[derive(Debug, Clone, Copy)]
pub struct TraderContext<'a> {
    pub trader: TraderId,
    pub side: Side,
    /// Private value.
    pub limit: f64,
    pub quote: Quote,
    /// Every shout of the game so far, oldest first.
    pub history: &'a [ShoutRecord],
    pub day: u32,
    pub round: u32,
    pub rounds_per_day: u32,
    pub min_price: f64,
    pub max_price: f64,
    pub remaining_units: u32,
    pub last_own_result: OwnResult,
}

impl TraderContext<'_> {
    /// The last `n` shouts.
    pub fn window(&self, n: usize) -> &[ShoutRecord] {
        &self.history[self.history.len().saturating_sub(n)..]
    }

    pub fn is_active(&self) -> bool {
        self.remaining_units > 0
    }

    /// Clamps `price` to the trader's no-loss side of its limit.
    pub fn no_loss(&self, price: f64) -> f64 {
        match self.side {
            Side::Buy => price.min(self.limit),
            Side::Sell => price.max(self.limit),
        }
    }
}

/// A trading strategy bound to one trader for one game.
pub trait Strategy: Send {
    fn name(&self) -> &'static str;

    fn begin_day(&mut self, _ctx: &TraderContext<'_>) {}

    /// Price to shout in this slot, or `None` to decline.
    fn shout(&mut self, ctx: &TraderContext<'_>, rng: &mut SimRng) -> Option<f64>;

    /// Called for every trader after each shout and each periodic trade.
    fn observe(&mut self, _ctx: &TraderContext<'_>, _event: &MarketEvent, _rng: &mut SimRng) {}

    /// Called at the end of every round in which the trader shouted, with
    /// the profit it realised during that round.
    fn end_round(&mut self, _reward: f64) {}
}

/// Named strategy with its parameters; the unit of configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StrategySpec {
    Truthful,
    ZiU,
    ZiC,
    Zip(ZipParams),
    Re(ReParams),
    Gd(GdParams),
    Kaplan(KaplanParams),
}

impl StrategySpec {
    /// Canonical short names: `tt`, `ziu`, `zic`, `zip`, `re`, `gd`, `kaplan`.
    pub fn name(&self) -> &'static str {
        match self {
            StrategySpec::Truthful => "tt",
            StrategySpec::ZiU => "ziu",
            StrategySpec::ZiC => "zic",
            StrategySpec::Zip(_) => "zip",
            StrategySpec::Re(_) => "re",
            StrategySpec::Gd(_) => "gd",
            StrategySpec::Kaplan(_) => "kaplan",
        }
    }

    /// Spec with default parameters for a canonical name.
    pub fn from_name(name: &str) -> Option<StrategySpec> {
        Some(match name {
            "tt" => StrategySpec::Truthful,
            "ziu" => StrategySpec::ZiU,
            "zic" => StrategySpec::ZiC,
            "zip" => StrategySpec::Zip(ZipParams::default()),
            "re" => StrategySpec::Re(ReParams::default()),
            "gd" => StrategySpec::Gd(GdParams::default()),
            "kaplan" => StrategySpec::Kaplan(KaplanParams::default()),
            _ => return None,
        })
    }

    /// Instantiates the strategy. Per-trader parameter draws (ZIP) come
    /// from `rng`.
    pub fn build(&self, rng: &mut SimRng) -> Box<dyn Strategy> {
        match self {
            StrategySpec::Truthful => Box::new(Truthful),
            StrategySpec::ZiU => Box::new(ZiU),
            StrategySpec::ZiC => Box::new(ZiC),
            StrategySpec::Zip(p) => Box::new(Zip::new(p, rng)),
            StrategySpec::Re(p) => Box::new(Re::new(p)),
            StrategySpec::Gd(p) => Box::new(Gd::new(p.clone())),
            StrategySpec::Kaplan(p) => Box::new(Kaplan::new(*p)),
        }
    }
}
