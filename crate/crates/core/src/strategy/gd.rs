//! Gjerstad–Dickhaut belief-based trading.
//!
//! A trader estimates, from a sliding window of recent shouts, the
//! probability that a shout at each price would be accepted, interpolates
//! between observed prices with zero-slope cubic segments, and shouts the
//! price that maximises expected surplus.

use serde::{Deserialize, Serialize};

use super::{Strategy, TraderContext};
use crate::market::{ShoutRecord, Side};
use crate::seed::SimRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GdParams {
    /// Number of most recent shouts used to form beliefs.
    pub window: usize,
    /// Uniform candidate prices added to the observed ones.
    pub grid_points: usize,
}

impl Default for GdParams {
    fn default() -> Self {
        GdParams {
            window: 30,
            grid_points: 64,
        }
    }
}

/// Acceptance-probability belief over prices in `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    side: Side,
    min: f64,
    max: f64,
    /// Sorted by price; empty means the linear prior.
    knots: Vec<(f64, f64)>,
}

impl Belief {
    /// Belief from explicit knots (sorted by price is not required). Values
    /// outside the knot range take the nearest knot's value.
    pub fn from_knots(side: Side, min: f64, max: f64, mut knots: Vec<(f64, f64)>) -> Self {
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        Belief { side, min, max, knots }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, price: f64) -> f64 {
        if self.knots.is_empty() {
            let t = ((price - self.min) / (self.max - self.min)).clamp(0.0, 1.0);
            return match self.side {
                Side::Buy => t,
                Side::Sell => 1.0 - t,
            };
        }
        let i = self.knots.partition_point(|k| k.0 <= price);
        if i == 0 {
            return self.knots[0].1;
        }
        if i == self.knots.len() {
            return self.knots[i - 1].1;
        }
        let (x0, q0) = self.knots[i - 1];
        let (x1, q1) = self.knots[i];
        let t = (price - x0) / (x1 - x0);
        (q0 + (q1 - q0) * t * t * (3.0 - 2.0 * t)).clamp(0.0, 1.0)
    }
}

fn raw_belief(window: &[ShoutRecord], side: Side, x: f64) -> Option<f64> {
    let (mut favourable, mut unfavourable) = (0usize, 0usize);
    for r in window {
        match (side, r.side) {
            // accepted bids at or below x and asks at or below x support a
            // bid at x; unaccepted bids at or above x count against it
            (Side::Buy, Side::Buy) if r.traded() && r.price <= x => favourable += 1,
            (Side::Buy, Side::Buy) if !r.traded() && r.price >= x => unfavourable += 1,
            (Side::Buy, Side::Sell) if r.price <= x => favourable += 1,
            (Side::Sell, Side::Sell) if r.traded() && r.price >= x => favourable += 1,
            (Side::Sell, Side::Sell) if !r.traded() && r.price <= x => unfavourable += 1,
            (Side::Sell, Side::Buy) if r.price >= x => favourable += 1,
            _ => {}
        }
    }
    let total = favourable + unfavourable;
    (total > 0).then(|| favourable as f64 / total as f64)
}

/// Belief of a trader on `side` given the recent shouts in `window`.
///
/// Raw acceptance frequencies are computed at each observed price, anchored
/// at the price bounds (0 and 1 for buyers at `min`/`max`, mirrored for
/// sellers) and forced monotone. An empty window gives a linear prior.
pub fn gd_belief(window: &[ShoutRecord], side: Side, min: f64, max: f64) -> Belief {
    if window.is_empty() {
        return Belief::from_knots(side, min, max, Vec::new());
    }
    let mut prices: Vec<f64> = window.iter().map(|r| r.price).filter(|&p| p > min && p < max).collect();
    prices.sort_by(f64::total_cmp);
    prices.dedup();

    let (q_min, q_max) = match side {
        Side::Buy => (0.0, 1.0),
        Side::Sell => (1.0, 0.0),
    };
    let mut knots = Vec::with_capacity(prices.len() + 2);
    knots.push((min, q_min));
    knots.extend(
        prices
            .into_iter()
            .filter_map(|x| raw_belief(window, side, x).map(|q| (x, q))),
    );
    knots.push((max, q_max));

    let mut prev = q_min;
    for k in knots.iter_mut() {
        k.1 = match side {
            Side::Buy => k.1.max(prev),
            Side::Sell => k.1.min(prev),
        }
        .clamp(0.0, 1.0);
        prev = k.1;
    }
    Belief { side, min, max, knots }
}

/// Candidate prices: the observed ones plus `points` uniform points on
/// `[min, max]`, sorted and deduplicated.
pub fn gd_grid(window: &[ShoutRecord], min: f64, max: f64, points: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = window
        .iter()
        .map(|r| r.price)
        .filter(|&p| p >= min && p <= max)
        .collect();
    match points {
        0 => {}
        1 => grid.push(min),
        n => grid.extend((0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64)),
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Grid price maximising expected surplus `|limit − p|·q(p)` on the no-loss
/// side. Ties go to the lower bid / higher ask. `None` if no candidate has
/// positive expected surplus.
pub fn gd_shout(limit: f64, side: Side, belief: &Belief, grid: &[f64]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |p: f64, surplus: f64| {
        let value = surplus * belief.eval(p);
        if best.is_none_or(|(_, v)| value > v) {
            best = Some((p, value));
        }
    };
    match side {
        Side::Buy => grid
            .iter()
            .filter(|&&p| p <= limit)
            .for_each(|&p| consider(p, limit - p)),
        Side::Sell => grid
            .iter()
            .rev()
            .filter(|&&p| p >= limit)
            .for_each(|&p| consider(p, p - limit)),
    }
    best.filter(|&(_, v)| v > 0.0).map(|(p, _)| p)
}

#[derive(Debug, Clone)]
pub struct Gd {
    params: GdParams,
}

impl Gd {
    pub fn new(params: GdParams) -> Self {
        Gd { params }
    }
}

impl Strategy for Gd {
    fn name(&self) -> &'static str {
        "gd"
    }

    fn shout(&mut self, ctx: &TraderContext<'_>, _rng: &mut SimRng) -> Option<f64> {
        let window = ctx.window(self.params.window);
        let belief = gd_belief(window, ctx.side, ctx.min_price, ctx.max_price);
        let grid = gd_grid(window, ctx.min_price, ctx.max_price, self.params.grid_points);
        gd_shout(ctx.limit, ctx.side, &belief, &grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{ShoutStatus, TraderId};
    use proptest::prelude::*;

    fn rec(side: Side, price: f64, traded: bool) -> ShoutRecord {
        ShoutRecord {
            seq: 0,
            trader: TraderId(1),
            side,
            price,
            status: if traded {
                ShoutStatus::Traded(price)
            } else {
                ShoutStatus::Stood
            },
        }
    }

    #[test]
    fn empty_window_is_linear() {
        let b = gd_belief(&[], Side::Buy, 0.0, 200.0);
        for x in [0.0, 37.0, 100.0, 200.0] {
            assert!((b.eval(x) - x / 200.0).abs() < 1e-12);
        }
        let s = gd_belief(&[], Side::Sell, 0.0, 200.0);
        assert!((s.eval(50.0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn accepted_bid_has_full_belief() {
        let w = [rec(Side::Buy, 10.0, true), rec(Side::Buy, 10.0, true)];
        let b = gd_belief(&w, Side::Buy, 0.0, 200.0);
        assert_eq!(b.eval(10.0), 1.0);
    }

    #[test]
    fn accepted_and_rejected_bids() {
        let w = [rec(Side::Buy, 10.0, true), rec(Side::Buy, 6.0, false)];
        let b = gd_belief(&w, Side::Buy, 0.0, 200.0);
        assert_eq!(b.eval(6.0), 0.0);
        assert_eq!(b.eval(10.0), 1.0);
        let mut prev = 0.0;
        for i in 1..40 {
            let q = b.eval(6.0 + 4.0 * i as f64 / 40.0);
            assert!(q > 0.0 && q < 1.0 && q > prev);
            prev = q;
        }
    }

    #[test]
    fn tie_breaks_toward_lower_bid() {
        let belief = Belief::from_knots(Side::Buy, 0.0, 200.0, vec![(6.0, 0.5), (8.0, 1.0)]);
        assert_eq!(gd_shout(10.0, Side::Buy, &belief, &[6.0, 8.0]), Some(6.0));
    }

    #[test]
    fn declines_without_positive_expectation() {
        let zero = Belief::from_knots(Side::Buy, 0.0, 200.0, vec![(0.0, 0.0), (200.0, 0.0)]);
        assert_eq!(gd_shout(10.0, Side::Buy, &zero, &[2.0, 5.0, 9.0]), None);
        // only the limit itself is on the grid: zero surplus
        let one = Belief::from_knots(Side::Buy, 0.0, 200.0, vec![(0.0, 1.0)]);
        assert_eq!(gd_shout(10.0, Side::Buy, &one, &[10.0]), None);
        assert_eq!(gd_shout(10.0, Side::Buy, &one, &[9.5, 10.0]), Some(9.5));
    }

    #[test]
    fn seller_ties_toward_higher_ask() {
        let belief = Belief::from_knots(Side::Sell, 0.0, 200.0, vec![(12.0, 1.0), (14.0, 0.5)]);
        assert_eq!(gd_shout(10.0, Side::Sell, &belief, &[12.0, 14.0]), Some(14.0));
    }

    #[test]
    fn grid_includes_observed_prices() {
        let w = [rec(Side::Buy, 10.3, true)];
        let g = gd_grid(&w, 0.0, 200.0, 64);
        assert_eq!(g.len(), 65);
        assert!(g.contains(&10.3));
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 200.0);
    }

    fn arb_record() -> impl Strategy<Value = ShoutRecord> {
        (any::<bool>(), 0.0..220.0f64, any::<bool>())
            .prop_map(|(buy, p, traded)| rec(if buy { Side::Buy } else { Side::Sell }, p, traded))
    }

    use proptest::strategy::Strategy;

    proptest! {
        #[test]
        fn belief_monotone_and_bounded(
            window in proptest::collection::vec(arb_record(), 0..40),
            buyer in any::<bool>(),
        ) {
            let side = if buyer { Side::Buy } else { Side::Sell };
            let b = gd_belief(&window, side, 0.0, 200.0);
            let mut prev = b.eval(0.0);
            for i in 1..=400 {
                let q = b.eval(i as f64 * 0.5);
                prop_assert!((0.0..=1.0).contains(&q));
                match side {
                    Side::Buy => prop_assert!(q >= prev - 1e-12),
                    Side::Sell => prop_assert!(q <= prev + 1e-12),
                }
                prev = q;
            }
        }
    }
}
