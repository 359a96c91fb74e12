use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    validate_shout, ClearingMode, MarketConfig, MarketError, MarketEvent, MarketTime, OrderBook, RejectReason,
    ScheduleTimeline, Shout, ShoutRecord, ShoutStatus, ShoutVerdict, Side, TraderId, Transaction,
};
use crate::seed::{derive_seed, rng_from_seed, SimRng};
use crate::strategy::{OwnResult, Strategy, StrategySpec, TraderContext};

/// Best standing bid and ask, with configured defaults for empty sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub bid: f64,
    pub ask: f64,
}

pub fn market_quote(book: &OrderBook, cfg: &MarketConfig) -> Quote {
    Quote {
        bid: book.best_bid().map_or(cfg.min_price, |s| s.price),
        ask: book.best_ask().map_or(cfg.max_price, |s| s.price),
    }
}

/// Draws the side of the next shout slot: `Sell` with probability `qs`.
pub fn select_next_side<R: Rng + ?Sized>(qs: f64, rng: &mut R) -> Side {
    if rng.random::<f64>() < qs {
        Side::Sell
    } else {
        Side::Buy
    }
}

/// Picks the next trader among the eligible ones. The side is drawn with
/// [`select_next_side`]; an exhausted side falls back to the other one.
pub fn pick_trader<R: Rng + ?Sized>(
    qs: f64,
    buyers: &[usize],
    sellers: &[usize],
    rng: &mut R,
) -> Result<usize, MarketError> {
    let side = select_next_side(qs, rng);
    let pool = match (side, buyers.is_empty(), sellers.is_empty()) {
        (_, true, true) => return Err(MarketError::NoEligibleTrader),
        (Side::Buy, false, _) | (Side::Sell, _, true) => buyers,
        (Side::Sell, _, false) | (Side::Buy, true, _) => sellers,
    };
    Ok(pool[rng.random_range(0..pool.len())])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShoutOutcome {
    Accepted,
    Rejected(RejectReason),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GameEvent {
    DayStart {
        day: u32,
    },
    Shout {
        shout: Shout,
        outcome: ShoutOutcome,
    },
    Transaction(Transaction),
    /// Quote snapshot taken at the end of every round.
    Quote {
        time: MarketTime,
        quote: Quote,
    },
}

/// Complete record of one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameLog {
    pub seed: u64,
    pub config: MarketConfig,
    pub timeline: ScheduleTimeline,
    pub strategies: Vec<String>,
    pub events: Vec<GameEvent>,
}

impl GameLog {
    pub fn transactions(&self) -> impl Iterator<Item = &Transaction> + '_ {
        self.events.iter().filter_map(|e| match e {
            GameEvent::Transaction(t) => Some(t),
            _ => None,
        })
    }

    /// Transactions grouped by day, one (possibly empty) list per day.
    pub fn transactions_by_day(&self) -> Vec<Vec<&Transaction>> {
        let mut days = vec![Vec::new(); self.config.days as usize];
        for t in self.transactions() {
            days[t.time.day as usize].push(t);
        }
        days
    }

    pub fn shouts(&self) -> impl Iterator<Item = (&Shout, ShoutOutcome)> + '_ {
        self.events.iter().filter_map(|e| match e {
            GameEvent::Shout { shout, outcome } => Some((shout, *outcome)),
            _ => None,
        })
    }
}

/// Runs one game, building each trader's strategy from `specs` (indexed by
/// trader id) with the trader's own RNG stream.
pub fn run_game(
    cfg: &MarketConfig,
    timeline: &ScheduleTimeline,
    specs: &[StrategySpec],
    seed: u64,
) -> Result<GameLog, MarketError> {
    let mut rngs = trader_rngs(seed, specs.len());
    let strategies = specs
        .iter()
        .zip(rngs.iter_mut())
        .map(|(spec, rng)| spec.build(rng))
        .collect();
    Game::new(cfg, timeline, strategies, rngs, seed)?.run()
}

/// Same as [`run_game`] with pre-built strategies.
pub fn run_game_with_strategies(
    cfg: &MarketConfig,
    timeline: &ScheduleTimeline,
    strategies: Vec<Box<dyn Strategy>>,
    seed: u64,
) -> Result<GameLog, MarketError> {
    let rngs = trader_rngs(seed, strategies.len());
    Game::new(cfg, timeline, strategies, rngs, seed)?.run()
}

fn trader_rngs(seed: u64, n: usize) -> Vec<SimRng> {
    (0..n).map(|i| rng_from_seed(derive_seed(seed, 1 + i as u64))).collect()
}

struct Seat {
    id: TraderId,
    side: Side,
    remaining: u32,
    strategy: Box<dyn Strategy>,
    rng: SimRng,
    last: OwnResult,
    shouted: bool,
    round_profit: f64,
}

struct Clock {
    day: u32,
    round: u32,
}

struct Game<'a> {
    cfg: &'a MarketConfig,
    timeline: &'a ScheduleTimeline,
    seed: u64,
    rng: SimRng,
    seats: Vec<Seat>,
    values: Vec<f64>,
    book: OrderBook,
    history: Vec<ShoutRecord>,
    events: Vec<GameEvent>,
    next_seq: u64,
}

fn context<'h>(
    seat: &Seat,
    limit: f64,
    quote: Quote,
    history: &'h [ShoutRecord],
    clock: &Clock,
    cfg: &MarketConfig,
) -> TraderContext<'h> {
    TraderContext {
        trader: seat.id,
        side: seat.side,
        limit,
        quote,
        history,
        day: clock.day,
        round: clock.round,
        rounds_per_day: cfg.rounds_per_day,
        min_price: cfg.min_price,
        max_price: cfg.max_price,
        remaining_units: seat.remaining,
        last_own_result: seat.last,
    }
}

impl<'a> Game<'a> {
    fn new(
        cfg: &'a MarketConfig,
        timeline: &'a ScheduleTimeline,
        strategies: Vec<Box<dyn Strategy>>,
        rngs: Vec<SimRng>,
        seed: u64,
    ) -> Result<Self, MarketError> {
        cfg.validate()?;
        let base = timeline.base();
        if strategies.len() != base.num_traders() {
            return Err(MarketError::ConfigInvalid(format!(
                "{} strategies bound for {} traders",
                strategies.len(),
                base.num_traders()
            )));
        }
        let seats = base
            .traders()
            .zip(strategies.into_iter().zip(rngs))
            .map(|((id, side, _), (strategy, rng))| Seat {
                id,
                side,
                remaining: 0,
                strategy,
                rng,
                last: OwnResult::None,
                shouted: false,
                round_profit: 0.0,
            })
            .collect();
        Ok(Game {
            cfg,
            timeline,
            seed,
            rng: rng_from_seed(derive_seed(seed, 0)),
            seats,
            values: Vec::new(),
            book: OrderBook::new(),
            history: Vec::new(),
            events: Vec::new(),
            next_seq: 0,
        })
    }

    fn run(mut self) -> Result<GameLog, MarketError> {
        for day in 0..self.cfg.days {
            let schedule = self.timeline.for_day(day);
            self.values = schedule.traders().map(|(_, _, v)| v).collect();
            self.events.push(GameEvent::DayStart { day });
            self.book.clear();
            let units = schedule.units_per_trader_per_day;
            let clock = Clock { day, round: 0 };
            let quote = market_quote(&self.book, self.cfg);
            for (seat, &limit) in self.seats.iter_mut().zip(&self.values) {
                seat.remaining = units;
                seat.last = OwnResult::None;
                let ctx = context(seat, limit, quote, &self.history, &clock, self.cfg);
                seat.strategy.begin_day(&ctx);
            }
            for round in 0..self.cfg.rounds_per_day {
                self.run_round(Clock { day, round })?;
            }
        }
        Ok(GameLog {
            seed: self.seed,
            config: self.cfg.clone(),
            timeline: self.timeline.clone(),
            strategies: self.seats.iter().map(|s| s.strategy.name().to_string()).collect(),
            events: self.events,
        })
    }

    fn run_round(&mut self, clock: Clock) -> Result<(), MarketError> {
        let n = self.seats.len();
        let mut offered = vec![false; n];
        for seat in &mut self.seats {
            seat.shouted = false;
            seat.round_profit = 0.0;
        }
        let mut buyers = Vec::with_capacity(n);
        let mut sellers = Vec::with_capacity(n);
        loop {
            buyers.clear();
            sellers.clear();
            for (i, seat) in self.seats.iter().enumerate() {
                if seat.remaining > 0 && !offered[i] {
                    match seat.side {
                        Side::Buy => buyers.push(i),
                        Side::Sell => sellers.push(i),
                    }
                }
            }
            let idx = match pick_trader(self.cfg.qs, &buyers, &sellers, &mut self.rng) {
                Ok(i) => i,
                Err(MarketError::NoEligibleTrader) => break,
                Err(e) => return Err(e),
            };
            offered[idx] = true;
            let quote = market_quote(&self.book, self.cfg);
            let seat = &mut self.seats[idx];
            let ctx = context(seat, self.values[idx], quote, &self.history, &clock, self.cfg);
            let Some(price) = seat.strategy.shout(&ctx, &mut seat.rng) else {
                continue;
            };
            if !price.is_finite() {
                continue;
            }
            let side = seat.side;
            let price = self.on_grid(price.max(0.0), side);
            self.process_shout(idx, price, &clock)?;
        }

        if let ClearingMode::Periodic { rounds_per_clear } = self.cfg.clearing_mode {
            let last_round = clock.round + 1 == self.cfg.rounds_per_day;
            if (clock.round + 1).is_multiple_of(rounds_per_clear) || last_round {
                for tx in self.book.clear_periodic(self.cfg.pricing) {
                    self.settle(tx);
                    self.broadcast(MarketEvent::Cleared { price: tx.price }, &clock);
                }
            }
        }
        if !self.cfg.persistent_shouts {
            self.book.clear();
        }
        self.events.push(GameEvent::Quote {
            time: MarketTime {
                day: clock.day,
                round: clock.round,
                seq: self.next_seq,
            },
            quote: market_quote(&self.book, self.cfg),
        });
        for seat in &mut self.seats {
            if seat.shouted {
                seat.strategy.end_round(seat.round_profit);
            }
        }
        Ok(())
    }

    fn on_grid(&self, price: f64, side: Side) -> f64 {
        match self.cfg.tick {
            None => price,
            Some(tick) => match side {
                Side::Buy => (price / tick).floor() * tick,
                Side::Sell => (price / tick).ceil() * tick,
            },
        }
    }

    fn process_shout(&mut self, idx: usize, price: f64, clock: &Clock) -> Result<(), MarketError> {
        let (id, side) = (self.seats[idx].id, self.seats[idx].side);
        let time = MarketTime {
            day: clock.day,
            round: clock.round,
            seq: self.next_seq,
        };
        self.next_seq += 1;
        let shout = Shout::new(id, side, price, time);
        let mut record = ShoutRecord {
            seq: time.seq,
            trader: id,
            side,
            price,
            status: ShoutStatus::Stood,
        };
        let status = match validate_shout(&self.book, &shout, self.cfg) {
            ShoutVerdict::Reject(reason) => {
                record.status = ShoutStatus::Rejected;
                self.history.push(record);
                self.events.push(GameEvent::Shout {
                    shout,
                    outcome: ShoutOutcome::Rejected(reason),
                });
                self.seats[idx].last = OwnResult::Rejected;
                ShoutStatus::Rejected
            }
            ShoutVerdict::Accept => {
                self.book.withdraw(id);
                self.history.push(record);
                self.events.push(GameEvent::Shout {
                    shout,
                    outcome: ShoutOutcome::Accepted,
                });
                self.seats[idx].last = OwnResult::Stood;
                match self.cfg.clearing_mode {
                    ClearingMode::Continuous => match self.book.post_continuous(shout, self.cfg.pricing)? {
                        Some(tx) => {
                            self.settle(tx);
                            ShoutStatus::Traded(tx.price)
                        }
                        None => ShoutStatus::Stood,
                    },
                    ClearingMode::Periodic { .. } => {
                        self.book.insert(shout);
                        ShoutStatus::Stood
                    }
                }
            }
        };
        self.seats[idx].shouted = true;
        self.broadcast(
            MarketEvent::Shout {
                trader: id,
                side,
                price,
                status,
            },
            clock,
        );
        Ok(())
    }

    fn settle(&mut self, tx: Transaction) {
        for (shout, profit) in [
            (&tx.bid, self.values[tx.bid.trader.0] - tx.price),
            (&tx.ask, tx.price - self.values[tx.ask.trader.0]),
        ] {
            let seat = &mut self.seats[shout.trader.0];
            seat.remaining -= 1;
            seat.round_profit += profit;
            seat.last = OwnResult::Traded(tx.price);
            self.history[shout.time.seq as usize].status = ShoutStatus::Traded(tx.price);
        }
        self.events.push(GameEvent::Transaction(tx));
    }

    fn broadcast(&mut self, event: MarketEvent, clock: &Clock) {
        let quote = market_quote(&self.book, self.cfg);
        let Game {
            seats,
            values,
            history,
            cfg,
            ..
        } = self;
        for (seat, &limit) in seats.iter_mut().zip(values.iter()) {
            let ctx = context(seat, limit, quote, history, clock, cfg);
            seat.strategy.observe(&ctx, &event, &mut seat.rng);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{Pricing, Schedule};

    #[test]
    fn quote_defaults_and_best() {
        let cfg = MarketConfig {
            min_price: 0.0,
            max_price: 1000.0,
            ..Default::default()
        };
        let mut book = OrderBook::new();
        assert_eq!(market_quote(&book, &cfg), Quote { bid: 0.0, ask: 1000.0 });
        let t = |seq| MarketTime { day: 0, round: 0, seq };
        book.insert(Shout::new(TraderId(0), Side::Buy, 8.0, t(0)));
        book.insert(Shout::new(TraderId(1), Side::Sell, 12.0, t(1)));
        assert_eq!(market_quote(&book, &cfg), Quote { bid: 8.0, ask: 12.0 });
        book.insert(Shout::new(TraderId(2), Side::Buy, 9.0, t(2)));
        assert_eq!(market_quote(&book, &cfg), Quote { bid: 9.0, ask: 12.0 });
    }

    #[test]
    fn side_selection_extremes_and_frequency() {
        let mut rng = rng_from_seed(3);
        assert!((0..1000).all(|_| select_next_side(1.0, &mut rng) == Side::Sell));
        assert!((0..1000).all(|_| select_next_side(0.0, &mut rng) == Side::Buy));
        let n = 100_000;
        let sells = (0..n).filter(|_| select_next_side(0.5, &mut rng) == Side::Sell).count();
        assert!((sells as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn pick_trader_falls_back_and_exhausts() {
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            assert_eq!(pick_trader(1.0, &[4], &[], &mut rng), Ok(4));
        }
        assert_eq!(pick_trader(0.5, &[], &[], &mut rng), Err(MarketError::NoEligibleTrader));
    }

    #[test]
    fn truthful_single_pair_trades_once_at_midpoint() {
        let cfg = MarketConfig {
            pricing: Pricing::Kda { k: 0.5 },
            ..Default::default()
        };
        let sched = Schedule::new(vec![10.0], vec![5.0]).unwrap();
        let log = run_game(
            &cfg,
            &sched.into(),
            &[StrategySpec::Truthful, StrategySpec::Truthful],
            11,
        )
        .unwrap();
        let trades: Vec<_> = log.transactions().collect();
        assert_eq!(trades.len(), 1);
        assert_eq!(trades[0].price, 7.5);
    }

    #[test]
    fn one_sided_schedule_has_no_trades() {
        let sched = Schedule::new(vec![10.0, 12.0], vec![]).unwrap();
        let log = run_game(
            &MarketConfig::default(),
            &sched.into(),
            &[StrategySpec::Truthful, StrategySpec::Truthful],
            1,
        )
        .unwrap();
        assert_eq!(log.transactions().count(), 0);
    }

    #[test]
    fn strategy_count_must_match() {
        let sched = Schedule::new(vec![10.0], vec![5.0]).unwrap();
        let err = run_game(&MarketConfig::default(), &sched.into(), &[StrategySpec::Truthful], 1);
        assert!(matches!(err, Err(MarketError::ConfigInvalid(_))));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let sched = Schedule::new(vec![10.0], vec![5.0]).unwrap();
        let cfg = MarketConfig {
            qs: 2.0,
            ..Default::default()
        };
        let err = run_game(
            &cfg,
            &sched.into(),
            &[StrategySpec::Truthful, StrategySpec::Truthful],
            1,
        );
        assert!(matches!(err, Err(MarketError::ConfigInvalid(_))));
    }

    #[test]
    fn tick_rounds_toward_no_loss_side() {
        let cfg = MarketConfig {
            tick: Some(1.0),
            ..Default::default()
        };
        let sched = Schedule::new(vec![10.5], vec![5.5]).unwrap();
        let log = run_game(
            &cfg,
            &sched.into(),
            &[StrategySpec::Truthful, StrategySpec::Truthful],
            2,
        )
        .unwrap();
        let prices: Vec<(Side, f64)> = log.shouts().map(|(s, _)| (s.side, s.price)).collect();
        assert!(prices.contains(&(Side::Buy, 10.0)));
        assert!(prices.contains(&(Side::Sell, 6.0)));
    }
}
