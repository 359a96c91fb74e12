//! Kaplan's sniper: wait in the background and jump in only when the
//! spread is narrow, the opposing quote is very profitable, or the day is
//! nearly over.

use serde::{Deserialize, Serialize};

use super::{Strategy, TraderContext};
use crate::market::Side;
use crate::seed::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KaplanParams {
    /// Relative spread `(ask − bid)/ask` at or below which to strike.
    pub spread_frac: f64,
    /// Strike when the opposing quote beats the limit by more than this
    /// fraction of it.
    pub profit_frac: f64,
    /// Strike when the remaining share of the day's rounds is at most this.
    pub time_frac: f64,
}

impl Default for KaplanParams {
    fn default() -> Self {
        KaplanParams {
            spread_frac: 0.1,
            profit_frac: 0.02,
            time_frac: 0.1,
        }
    }
}

pub fn kaplan_shout(ctx: &TraderContext<'_>, params: &KaplanParams) -> Option<f64> {
    let (bid, ask) = (ctx.quote.bid, ctx.quote.ask);
    let opposing = match ctx.side {
        Side::Buy => ask,
        Side::Sell => bid,
    };
    let profitable = match ctx.side {
        Side::Buy => opposing < ctx.limit,
        Side::Sell => opposing > ctx.limit,
    };
    if !profitable {
        return None;
    }
    let narrow = ask > 0.0 && (ask - bid) / ask <= params.spread_frac;
    let juicy = (opposing - ctx.limit).abs() > params.profit_frac * ctx.limit;
    let remaining = (ctx.rounds_per_day - ctx.round) as f64 / ctx.rounds_per_day as f64;
    let late = remaining <= params.time_frac;
    (narrow || juicy || late).then(|| ctx.no_loss(opposing))
}

#[derive(Debug, Clone, Copy)]
pub struct Kaplan {
    params: KaplanParams,
}

impl Kaplan {
    pub fn new(params: KaplanParams) -> Self {
        Kaplan { params }
    }
}

impl Strategy for Kaplan {
    fn name(&self) -> &'static str {
        "kaplan"
    }

    fn shout(&mut self, ctx: &TraderContext<'_>, _rng: &mut SimRng) -> Option<f64> {
        kaplan_shout(ctx, &self.params)
    }
}
