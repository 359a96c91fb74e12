use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{
    clearing_price, transaction_price, MarketConfig, MarketError, Pricing, Shout, Side, TraderId, Transaction,
};

/// Standing shouts, best first on each side. Equal prices keep arrival
/// order (earlier sequence number first).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OrderBook {
    bids: Vec<Shout>,
    asks: Vec<Shout>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectReason {
    NoImprovement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShoutVerdict {
    Accept,
    Reject(RejectReason),
}

fn bid_order(a: &Shout, b: &Shout) -> Ordering {
    b.price.total_cmp(&a.price).then(a.time.seq.cmp(&b.time.seq))
}

fn ask_order(a: &Shout, b: &Shout) -> Ordering {
    a.price.total_cmp(&b.price).then(a.time.seq.cmp(&b.time.seq))
}

/// Applies the improvement rule, if enabled.
pub fn validate_shout(book: &OrderBook, shout: &Shout, cfg: &MarketConfig) -> ShoutVerdict {
    if !cfg.improvement_rule {
        return ShoutVerdict::Accept;
    }
    let improves = match shout.side {
        Side::Buy => book.best_bid().is_none_or(|b| shout.price > b.price),
        Side::Sell => book.best_ask().is_none_or(|a| shout.price < a.price),
    };
    if improves {
        ShoutVerdict::Accept
    } else {
        ShoutVerdict::Reject(RejectReason::NoImprovement)
    }
}

impl OrderBook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bids(&self) -> &[Shout] {
        &self.bids
    }

    pub fn asks(&self) -> &[Shout] {
        &self.asks
    }

    pub fn best_bid(&self) -> Option<&Shout> {
        self.bids.first()
    }

    pub fn best_ask(&self) -> Option<&Shout> {
        self.asks.first()
    }

    pub fn len(&self) -> usize {
        self.bids.len() + self.asks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty() && self.asks.is_empty()
    }

    pub fn is_crossed(&self) -> bool {
        match (self.best_bid(), self.best_ask()) {
            (Some(b), Some(a)) => b.price >= a.price,
            _ => false,
        }
    }

    pub fn insert(&mut self, shout: Shout) {
        let side = match shout.side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        };
        let order = if shout.side == Side::Buy { bid_order } else { ask_order };
        let at = side.partition_point(|s| order(s, &shout) == Ordering::Less);
        side.insert(at, shout);
    }

    /// Removes every standing shout of `trader`, returning the first found.
    pub fn withdraw(&mut self, trader: TraderId) -> Option<Shout> {
        let mut removed = None;
        for side in [&mut self.bids, &mut self.asks] {
            if let Some(i) = side.iter().position(|s| s.trader == trader) {
                removed = removed.or(Some(side.remove(i)));
            }
        }
        removed
    }

    pub fn clear(&mut self) {
        self.bids.clear();
        self.asks.clear();
    }

    /// Inserts an accepted shout and executes at most one trade if the book
    /// crosses. The book is uncrossed on return provided it was uncrossed
    /// before.
    pub fn post_continuous(&mut self, shout: Shout, pricing: Pricing) -> Result<Option<Transaction>, MarketError> {
        self.insert(shout);
        if !self.is_crossed() {
            return Ok(None);
        }
        let bid = self.bids.remove(0);
        let ask = self.asks.remove(0);
        let price = transaction_price(ask.price, bid.price, pricing)?;
        Ok(Some(Transaction {
            bid,
            ask,
            price,
            time: shout.time,
        }))
    }

    /// Matches the maximal crossing prefix of the sorted book at one uniform
    /// price taken from the clearing interval
    /// `[max(a_M, b_{M+1}), min(b_M, a_{M+1})]`. Matched shouts leave the
    /// book; the rest stand.
    pub fn clear_periodic(&mut self, pricing: Pricing) -> Vec<Transaction> {
        let m = self
            .bids
            .iter()
            .zip(&self.asks)
            .take_while(|(b, a)| b.price >= a.price)
            .count();
        if m == 0 {
            return Vec::new();
        }
        let mut low = self.asks[m - 1].price;
        let mut high = self.bids[m - 1].price;
        if let Some(b) = self.bids.get(m) {
            low = low.max(b.price);
        }
        if let Some(a) = self.asks.get(m) {
            high = high.min(a.price);
        }
        let price = clearing_price(low, high, pricing);
        let bids: Vec<Shout> = self.bids.drain(..m).collect();
        let asks: Vec<Shout> = self.asks.drain(..m).collect();
        bids.into_iter()
            .zip(asks)
            .map(|(bid, ask)| Transaction {
                time: if bid.time.seq > ask.time.seq {
                    bid.time
                } else {
                    ask.time
                },
                bid,
                ask,
                price,
            })
            .collect()
    }
}
