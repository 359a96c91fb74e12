//! The auction engine.

mod book;
mod config;
mod engine;
mod equilibrium;
mod error;
mod pricing;
mod schedule;
mod types;

pub use book::{validate_shout, OrderBook, RejectReason, ShoutVerdict};
pub use config::{ClearingMode, MarketConfig, Pricing};
pub use engine::{
    market_quote, pick_trader, run_game, run_game_with_strategies, select_next_side, GameEvent, GameLog, Quote,
    ShoutOutcome,
};
pub use equilibrium::{compute_equilibrium, EquilibriumReport};
pub use error::MarketError;
pub use pricing::{clearing_price, transaction_price};
pub use schedule::{Schedule, ScheduleTimeline};
pub use types::{MarketEvent, MarketTime, Shout, ShoutRecord, ShoutStatus, Side, TraderId, Transaction};
