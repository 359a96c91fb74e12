use super::{Strategy, TraderContext};
use crate::seed::SimRng;

/// Shouts the private value.
pub fn tt_shout(ctx: &TraderContext<'_>) -> f64 {
    ctx.limit
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Truthful;

impl Strategy for Truthful {
    fn name(&self) -> &'static str {
        "tt"
    }

    fn shout(&mut self, ctx: &TraderContext<'_>, _rng: &mut SimRng) -> Option<f64> {
        Some(tt_shout(ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::Side;
    use crate::seed::rng_from_seed;
    use crate::strategy::test_support::ctx;

    #[test]
    fn shouts_limit() {
        let mut rng = rng_from_seed(0);
        let mut tt = Truthful;
        assert_eq!(tt.shout(&ctx(Side::Buy, 10.0), &mut rng), Some(10.0));
        assert_eq!(tt.shout(&ctx(Side::Sell, 5.0), &mut rng), Some(5.0));
        assert_eq!(tt.shout(&ctx(Side::Sell, 5.0), &mut rng), Some(5.0));
    }
}
