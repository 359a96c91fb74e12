use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("invalid market configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("crossed pricing input: ask {ask} exceeds bid {bid}")]
    CrossedInput { ask: f64, bid: f64 },
    #[error("no eligible trader on either side")]
    NoEligibleTrader,
}
