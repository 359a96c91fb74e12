use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }
}

/// Index of a trader within a [`Schedule`](super::Schedule): buyers come
/// first, then sellers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraderId(pub usize);

impl std::fmt::Display for TraderId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Market clock. `seq` increases strictly across the whole game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarketTime {
    pub day: u32,
    pub round: u32,
    pub seq: u64,
}

/// A priced offer to buy (bid) or sell (ask).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shout {
    pub trader: TraderId,
    pub side: Side,
    pub price: f64,
    pub quantity: u32,
    pub time: MarketTime,
}

impl Shout {
    pub fn new(trader: TraderId, side: Side, price: f64, time: MarketTime) -> Self {
        Shout {
            trader,
            side,
            price,
            quantity: 1,
            time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub bid: Shout,
    pub ask: Shout,
    pub price: f64,
    pub time: MarketTime,
}

impl Transaction {
    pub fn buyer(&self) -> TraderId {
        self.bid.trader
    }

    pub fn seller(&self) -> TraderId {
        self.ask.trader
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShoutStatus {
    /// Accepted into the book and still unmatched.
    Stood,
    /// Refused by the improvement rule.
    Rejected,
    /// Matched at the given transaction price.
    Traded(f64),
}

/// Public record of a shout, kept in the market history visible to
/// strategies. The status of a standing shout is updated in place when it
/// later trades.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShoutRecord {
    pub seq: u64,
    pub trader: TraderId,
    pub side: Side,
    pub price: f64,
    pub status: ShoutStatus,
}

impl ShoutRecord {
    pub fn traded(&self) -> bool {
        matches!(self.status, ShoutStatus::Traded(_))
    }
}

/// Observation broadcast to every trader after each engine step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarketEvent {
    /// A shout was made; `status` tells whether it traded immediately.
    Shout {
        trader: TraderId,
        side: Side,
        price: f64,
        status: ShoutStatus,
    },
    /// A periodic clear executed a trade at `price`.
    Cleared { price: f64 },
}
