//! Zero-intelligence-plus: a profit margin adapted by the Widrow–Hoff rule
//! with momentum toward perturbed targets derived from market events.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Strategy, TraderContext};
use crate::market::{MarketEvent, ShoutStatus, Side};
use crate::seed::SimRng;

/// Per-population parameter ranges. Each trader draws its learning rate,
/// momentum and initial margin uniformly from the `[lo, hi]` ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZipParams {
    pub beta: [f64; 2],
    pub gamma: [f64; 2],
    pub margin: [f64; 2],
    /// Upper bound of the absolute target perturbation.
    pub ca: f64,
    /// Upper bound of the relative target perturbation.
    pub cr: f64,
}

impl Default for ZipParams {
    fn default() -> Self {
        ZipParams {
            beta: [0.1, 0.5],
            gamma: [0.0, 0.1],
            margin: [0.05, 0.35],
            ca: 0.05,
            cr: 0.05,
        }
    }
}

fn draw<R: Rng + ?Sized>(range: [f64; 2], rng: &mut R) -> f64 {
    let (lo, hi) = (range[0].min(range[1]), range[0].max(range[1]));
    lo + rng.random::<f64>() * (hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjustment {
    RaisePrice,
    LowerPrice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipState {
    /// Non-negative margin: sellers ask `limit·(1+margin)`, buyers bid
    /// `limit·(1−margin)`.
    pub margin: f64,
    pub momentum: f64,
    pub beta: f64,
    pub gamma: f64,
    pub ca: f64,
    pub cr: f64,
}

impl ZipState {
    pub fn price(&self, side: Side, limit: f64) -> f64 {
        match side {
            Side::Sell => limit * (1.0 + self.margin),
            Side::Buy => limit * (1.0 - self.margin.abs()),
        }
    }

    /// Perturbed target around an observed price `q`.
    pub fn target<R: Rng + ?Sized>(&self, q: f64, adj: Adjustment, rng: &mut R) -> f64 {
        let u_r: f64 = rng.random();
        let u_a: f64 = rng.random();
        match adj {
            Adjustment::RaisePrice => (1.0 + u_r * self.cr) * q + u_a * self.ca,
            Adjustment::LowerPrice => (1.0 - u_r * self.cr) * q - u_a * self.ca,
        }
    }

    /// One Widrow–Hoff step with momentum toward `target`; the margin is
    /// recomputed from the new price and kept on the no-loss side.
    pub fn update(&mut self, side: Side, limit: f64, target: f64) {
        let p = self.price(side, limit);
        let delta = self.beta * (target - p);
        self.momentum = self.gamma * self.momentum + (1.0 - self.gamma) * delta;
        let next = p + self.momentum;
        if limit <= 0.0 {
            return;
        }
        self.margin = match side {
            Side::Sell => (next / limit - 1.0).max(0.0),
            Side::Buy => (1.0 - next / limit).clamp(0.0, 1.0),
        };
    }
}

pub fn zip_shout(state: &ZipState, ctx: &TraderContext<'_>) -> f64 {
    state.price(ctx.side, ctx.limit)
}

/// Which way a trader at `price` should move after `event`, and the
/// observed price to aim at. Raise rules apply to every trader; lower rules
/// only to traders still able to trade.
pub fn zip_adjustment(side: Side, price: f64, active: bool, event: &MarketEvent) -> Option<(Adjustment, f64)> {
    let margin_up = match side {
        Side::Sell => Adjustment::RaisePrice,
        Side::Buy => Adjustment::LowerPrice,
    };
    let margin_down = match side {
        Side::Sell => Adjustment::LowerPrice,
        Side::Buy => Adjustment::RaisePrice,
    };
    // true if a shout at `price` would be at least as competitive as one at `q`
    let at_least_as_good = |q: f64| match side {
        Side::Sell => price <= q,
        Side::Buy => price >= q,
    };
    let at_most_as_good = |q: f64| match side {
        Side::Sell => price >= q,
        Side::Buy => price <= q,
    };
    match *event {
        MarketEvent::Cleared { price: q } => at_least_as_good(q).then_some((margin_up, q)),
        MarketEvent::Shout {
            side: shout_side,
            price: shout_price,
            status,
            ..
        } => match status {
            ShoutStatus::Traded(q) => {
                if at_least_as_good(q) {
                    Some((margin_up, q))
                } else if active && shout_side != side && at_most_as_good(q) {
                    Some((margin_down, q))
                } else {
                    None
                }
            }
            ShoutStatus::Stood | ShoutStatus::Rejected => {
                (active && shout_side == side && at_most_as_good(shout_price)).then_some((margin_down, shout_price))
            }
        },
    }
}

#[derive(Debug, Clone)]
pub struct Zip {
    state: ZipState,
}

impl Zip {
    pub fn new<R: Rng + ?Sized>(params: &ZipParams, rng: &mut R) -> Self {
        let beta = draw(params.beta, rng);
        let gamma = draw(params.gamma, rng);
        let margin = draw(params.margin, rng);
        Zip {
            state: ZipState {
                margin,
                momentum: 0.0,
                beta,
                gamma,
                ca: params.ca,
                cr: params.cr,
            },
        }
    }

    pub fn from_state(state: ZipState) -> Self {
        Zip { state }
    }

    pub fn state(&self) -> &ZipState {
        &self.state
    }
}

impl Strategy for Zip {
    fn name(&self) -> &'static str {
        "zip"
    }

    fn shout(&mut self, ctx: &TraderContext<'_>, _rng: &mut SimRng) -> Option<f64> {
        Some(zip_shout(&self.state, ctx))
    }

    fn observe(&mut self, ctx: &TraderContext<'_>, event: &MarketEvent, rng: &mut SimRng) {
        let price = self.state.price(ctx.side, ctx.limit);
        if let Some((adj, q)) = zip_adjustment(ctx.side, price, ctx.is_active(), event) {
            let target = self.state.target(q, adj, rng);
            self.state.update(ctx.side, ctx.limit, target);
        }
    }
}
