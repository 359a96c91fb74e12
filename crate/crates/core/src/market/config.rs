use serde::{Deserialize, Serialize};

use super::MarketError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClearingMode {
    /// Crossing shouts trade immediately (CDA).
    Continuous,
    /// The book is cleared at one uniform price every `rounds_per_clear`
    /// rounds and at the end of each day (clearing house).
    Periodic { rounds_per_clear: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Pricing {
    /// `k·ask + (1−k)·bid`. Under periodic clearing `ask`/`bid` are the
    /// lower/upper ends of the clearing interval.
    Kda { k: f64 },
    /// `low + ku·(high − low)` over the clearing interval. `ku = 0` is the
    /// (M+1)st-price rule, `ku = 1` the Mth-price rule.
    Uniform { ku: f64 },
}

/// Rule set of one auction mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    pub clearing_mode: ClearingMode,
    /// NYSE rule: a new shout must strictly beat the best on its side.
    pub improvement_rule: bool,
    pub pricing: Pricing,
    /// Probability that the next shout slot goes to a seller.
    pub qs: f64,
    pub days: u32,
    pub rounds_per_day: u32,
    /// Quote reported for an empty bid side; lower bound for random shouts.
    pub min_price: f64,
    /// Quote reported for an empty ask side; upper bound for random shouts.
    pub max_price: f64,
    /// Unmatched shouts stay in the book for the rest of the day.
    pub persistent_shouts: bool,
    /// Optional price grid. Shouts are rounded onto it toward the
    /// trader's no-loss side.
    pub tick: Option<f64>,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            clearing_mode: ClearingMode::Continuous,
            improvement_rule: false,
            pricing: Pricing::Kda { k: 0.5 },
            qs: 0.5,
            days: 1,
            rounds_per_day: 50,
            min_price: 0.0,
            max_price: 200.0,
            persistent_shouts: true,
            tick: None,
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<(), MarketError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(MarketError::ConfigInvalid(format!("{name} = {v} is outside [0, 1]")))
    }
}

impl MarketConfig {
    pub fn validate(&self) -> Result<(), MarketError> {
        unit_interval("qs", self.qs)?;
        match self.pricing {
            Pricing::Kda { k } => unit_interval("k", k)?,
            Pricing::Uniform { ku } => unit_interval("ku", ku)?,
        }
        if self.days == 0 {
            return Err(MarketError::ConfigInvalid("days must be at least 1".into()));
        }
        if self.rounds_per_day == 0 {
            return Err(MarketError::ConfigInvalid("rounds_per_day must be at least 1".into()));
        }
        if let ClearingMode::Periodic { rounds_per_clear } = self.clearing_mode {
            if rounds_per_clear == 0 {
                return Err(MarketError::ConfigInvalid("rounds_per_clear must be at least 1".into()));
            }
        }
        if !(self.min_price.is_finite() && self.max_price.is_finite())
            || self.min_price < 0.0
            || self.min_price >= self.max_price
        {
            return Err(MarketError::ConfigInvalid(format!(
                "price bounds ({}, {}) must satisfy 0 <= min < max",
                self.min_price, self.max_price
            )));
        }
        if let Some(t) = self.tick {
            if !(t.is_finite() && t > 0.0) {
                return Err(MarketError::ConfigInvalid(format!("tick {t} must be positive")));
            }
        }
        Ok(())
    }
}
