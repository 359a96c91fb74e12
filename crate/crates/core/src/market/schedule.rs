use serde::{Deserialize, Serialize};

use super::{MarketError, Side, TraderId};

/// Private values of every trader. Buyers are traders `0..n_buyers`, sellers
/// follow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub buyer_values: Vec<f64>,
    pub seller_values: Vec<f64>,
    pub units_per_trader_per_day: u32,
}

impl Schedule {
    pub fn new(buyer_values: Vec<f64>, seller_values: Vec<f64>) -> Result<Self, MarketError> {
        Self::with_units(buyer_values, seller_values, 1)
    }

    pub fn with_units(
        buyer_values: Vec<f64>,
        seller_values: Vec<f64>,
        units_per_trader_per_day: u32,
    ) -> Result<Self, MarketError> {
        if units_per_trader_per_day == 0 {
            return Err(MarketError::InvalidSchedule(
                "units_per_trader_per_day must be at least 1".into(),
            ));
        }
        for v in buyer_values.iter().chain(&seller_values) {
            if !v.is_finite() || *v < 0.0 {
                return Err(MarketError::InvalidSchedule(format!(
                    "private value {v} is not a non-negative finite number"
                )));
            }
        }
        Ok(Schedule {
            buyer_values,
            seller_values,
            units_per_trader_per_day,
        })
    }

    pub fn num_buyers(&self) -> usize {
        self.buyer_values.len()
    }

    pub fn num_sellers(&self) -> usize {
        self.seller_values.len()
    }

    pub fn num_traders(&self) -> usize {
        self.buyer_values.len() + self.seller_values.len()
    }

    pub fn buyer_id(&self, i: usize) -> TraderId {
        TraderId(i)
    }

    pub fn seller_id(&self, j: usize) -> TraderId {
        TraderId(self.buyer_values.len() + j)
    }

    pub fn side_of(&self, id: TraderId) -> Option<Side> {
        if id.0 < self.num_buyers() {
            Some(Side::Buy)
        } else if id.0 < self.num_traders() {
            Some(Side::Sell)
        } else {
            None
        }
    }

    pub fn value_of(&self, id: TraderId) -> Option<f64> {
        if id.0 < self.num_buyers() {
            Some(self.buyer_values[id.0])
        } else {
            self.seller_values.get(id.0 - self.num_buyers()).copied()
        }
    }

    /// `(id, side, private value)` for every trader, buyers first.
    pub fn traders(&self) -> impl Iterator<Item = (TraderId, Side, f64)> + '_ {
        let nb = self.num_buyers();
        self.buyer_values
            .iter()
            .enumerate()
            .map(|(i, &v)| (TraderId(i), Side::Buy, v))
            .chain(
                self.seller_values
                    .iter()
                    .enumerate()
                    .map(move |(j, &v)| (TraderId(nb + j), Side::Sell, v)),
            )
    }
}

/// A base schedule plus day-indexed replacements (demand/supply shocks).
/// Replacements keep the trader population fixed and only change values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTimeline {
    base: Schedule,
    shifts: Vec<(u32, Schedule)>,
}

impl ScheduleTimeline {
    pub fn new(base: Schedule, mut shifts: Vec<(u32, Schedule)>) -> Result<Self, MarketError> {
        for (day, s) in &shifts {
            if s.num_buyers() != base.num_buyers() || s.num_sellers() != base.num_sellers() {
                return Err(MarketError::InvalidSchedule(format!(
                    "schedule shift on day {day} changes the number of traders"
                )));
            }
        }
        shifts.sort_by_key(|(d, _)| *d);
        Ok(ScheduleTimeline { base, shifts })
    }

    pub fn base(&self) -> &Schedule {
        &self.base
    }

    pub fn shifts(&self) -> &[(u32, Schedule)] {
        &self.shifts
    }

    /// Schedule in force on `day` (0-based).
    pub fn for_day(&self, day: u32) -> &Schedule {
        self.shifts
            .iter()
            .rev()
            .find(|(d, _)| *d <= day)
            .map(|(_, s)| s)
            .unwrap_or(&self.base)
    }
}

impl From<Schedule> for ScheduleTimeline {
    fn from(base: Schedule) -> Self {
        ScheduleTimeline {
            base,
            shifts: Vec::new(),
        }
    }
}
