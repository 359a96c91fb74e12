use serde::{Deserialize, Serialize};

use super::Schedule;

/// Competitive equilibrium of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub q0: usize,
    /// `[low, high]`; `None` when no unit can trade.
    pub price_interval: Option<(f64, f64)>,
    /// Midpoint of the interval.
    pub p0: Option<f64>,
}

/// Unit values per side, one entry per unit a trader may trade in a day.
pub(crate) fn unit_values(s: &Schedule) -> (Vec<f64>, Vec<f64>) {
    let u = s.units_per_trader_per_day as usize;
    let mut buyers: Vec<f64> = s.buyer_values.iter().flat_map(|&v| std::iter::repeat_n(v, u)).collect();
    let mut sellers: Vec<f64> = s
        .seller_values
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, u))
        .collect();
    buyers.sort_by(|a, b| b.total_cmp(a));
    sellers.sort_by(|a, b| a.total_cmp(b));
    (buyers, sellers)
}

/// Equilibrium quantity, price interval and midpoint price.
///
/// With buyer values sorted descending (`b`) and seller values ascending
/// (`s`), `q0` is the largest `m` with `b[m] >= s[m]` and the interval is
/// `[max(s[m], b[m+1]), min(b[m], s[m+1])]` (1-based, missing neighbours
/// ignored).
pub fn compute_equilibrium(schedule: &Schedule) -> EquilibriumReport {
    let (buyers, sellers) = unit_values(schedule);
    let q0 = buyers.iter().zip(&sellers).take_while(|(b, s)| b >= s).count();
    if q0 == 0 {
        return EquilibriumReport {
            q0,
            price_interval: None,
            p0: None,
        };
    }
    let mut low = sellers[q0 - 1];
    let mut high = buyers[q0 - 1];
    if let Some(&b) = buyers.get(q0) {
        low = low.max(b);
    }
    if let Some(&s) = sellers.get(q0) {
        high = high.min(s);
    }
    EquilibriumReport {
        q0,
        price_interval: Some((low, high)),
        p0: Some(0.5 * (low + high)),
    }
}
