use rand::Rng;

use super::{Strategy, TraderContext};
use crate::market::Side;
use crate::seed::SimRng;

/// Uniform on `[min_price, max_price)`, ignoring the limit.
pub fn zi_u_shout<R: Rng + ?Sized>(ctx: &TraderContext<'_>, rng: &mut R) -> f64 {
    ctx.min_price + rng.random::<f64>() * (ctx.max_price - ctx.min_price)
}

/// Uniform on the no-loss part of the price range: `(min, limit]` for buyers
/// and `[limit, max)` for sellers. A limit outside the bounds is clamped.
pub fn zi_c_shout<R: Rng + ?Sized>(ctx: &TraderContext<'_>, rng: &mut R) -> f64 {
    let limit = ctx.limit.clamp(ctx.min_price, ctx.max_price);
    if limit != ctx.limit {
        log::warn!(
            "trader {} limit {} outside price bounds [{}, {}]; clamped",
            ctx.trader,
            ctx.limit,
            ctx.min_price,
            ctx.max_price
        );
    }
    let u: f64 = rng.random();
    match ctx.side {
        // 1 - u is in (0, 1], so the draw is in (min, limit]
        Side::Buy => ctx.min_price + (1.0 - u) * (limit - ctx.min_price),
        Side::Sell => limit + u * (ctx.max_price - limit),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZiU;

impl Strategy for ZiU {
    fn name(&self) -> &'static str {
        "ziu"
    }

    fn shout(&mut self, ctx: &TraderContext<'_>, rng: &mut SimRng) -> Option<f64> {
        Some(zi_u_shout(ctx, rng))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZiC;

impl Strategy for ZiC {
    fn name(&self) -> &'static str {
        "zic"
    }

    fn shout(&mut self, ctx: &TraderContext<'_>, rng: &mut SimRng) -> Option<f64> {
        Some(zi_c_shout(ctx, rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::strategy::test_support::ctx;

    #[test]
    fn zi_u_mean_and_unconstrained() {
        let mut rng = rng_from_seed(5);
        let c = ctx(Side::Buy, 10.0);
        let draws: Vec<f64> = (0..100_000).map(|_| zi_u_shout(&c, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 100.0).abs() < 1.0, "mean {mean}");
        assert!(draws.iter().any(|&p| p > 10.0));
        assert!(draws.iter().all(|&p| (0.0..200.0).contains(&p)));
    }

    #[test]
    fn zi_u_is_deterministic_per_stream() {
        let c = ctx(Side::Sell, 10.0);
        let a: Vec<f64> = {
            let mut r = rng_from_seed(9);
            (0..10).map(|_| zi_u_shout(&c, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = rng_from_seed(9);
            (0..10).map(|_| zi_u_shout(&c, &mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn zi_c_never_loses() {
        let mut rng = rng_from_seed(6);
        let buyer = ctx(Side::Buy, 10.0);
        let seller = ctx(Side::Sell, 5.0);
        let bids: Vec<f64> = (0..100_000).map(|_| zi_c_shout(&buyer, &mut rng)).collect();
        assert!(bids.iter().all(|&p| p > 0.0 && p <= 10.0));
        let mean = bids.iter().sum::<f64>() / bids.len() as f64;
        assert!((mean - 5.0).abs() < 0.1, "mean {mean}");
        assert!((0..10_000).all(|_| zi_c_shout(&seller, &mut rng) >= 5.0));
    }

    #[test]
    fn zi_c_clamps_out_of_range_limit() {
        let mut rng = rng_from_seed(6);
        let buyer = ctx(Side::Buy, 500.0);
        assert!((0..1000).all(|_| zi_c_shout(&buyer, &mut rng) <= 200.0));
    }
}
