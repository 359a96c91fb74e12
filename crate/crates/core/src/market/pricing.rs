use super::{MarketError, Pricing};

/// Price of a single matched pair under continuous clearing.
///
/// `Kda { k }` gives `k·ask + (1−k)·bid`; `Uniform { ku }` treats `[ask, bid]`
/// as the clearing interval and gives `ask + ku·(bid − ask)`.
pub fn transaction_price(ask: f64, bid: f64, pricing: Pricing) -> Result<f64, MarketError> {
    if ask > bid {
        return Err(MarketError::CrossedInput { ask, bid });
    }
    Ok(clearing_price(ask, bid, pricing))
}

/// Uniform price chosen inside the clearing interval `[low, high]`.
pub fn clearing_price(low: f64, high: f64, pricing: Pricing) -> f64 {
    let p = match pricing {
        Pricing::Kda { k } => k * low + (1.0 - k) * high,
        Pricing::Uniform { ku } => low + ku * (high - low),
    };
    // rounding can leave p an ulp outside the interval
    p.clamp(low, high)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kda_examples() {
        let p = |k| transaction_price(10.0, 20.0, Pricing::Kda { k }).unwrap();
        assert_eq!(p(0.5), 15.0);
        assert_eq!(p(0.0), 20.0);
        assert_eq!(p(1.0), 10.0);
        assert_eq!(p(0.25), 17.5);
    }

    #[test]
    fn crossed_input_is_an_error() {
        assert_eq!(
            transaction_price(21.0, 20.0, Pricing::Kda { k: 0.5 }),
            Err(MarketError::CrossedInput { ask: 21.0, bid: 20.0 })
        );
    }

    #[test]
    fn uniform_is_reparameterised_kda() {
        for i in 0..=10 {
            let k = i as f64 / 10.0;
            let a = clearing_price(12.0, 15.0, Pricing::Kda { k });
            let b = clearing_price(12.0, 15.0, Pricing::Uniform { ku: 1.0 - k });
            assert!((a - b).abs() < 1e-12);
        }
    }
}
