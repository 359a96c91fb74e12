//! Brute-force reference implementations, written without reference to
//! the library code they check.

#![allow(dead_code)]

/// Equilibrium by scanning candidate prices: `q0` is the largest
/// quantity both sides are willing to trade at some price, and the price
/// interval is the set of candidate prices where supply and demand can
/// both be met at `q0` units.
pub fn scan_equilibrium(buyers: &[f64], sellers: &[f64]) -> (usize, Option<(f64, f64)>) {
    let mut candidates: Vec<f64> = buyers.iter().chain(sellers).copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let demand_at_least = |p: f64| buyers.iter().filter(|&&v| v >= p).count();
    let demand_above = |p: f64| buyers.iter().filter(|&&v| v > p).count();
    let supply_at_most = |p: f64| sellers.iter().filter(|&&v| v <= p).count();
    let supply_below = |p: f64| sellers.iter().filter(|&&v| v < p).count();
    let q0 = candidates
        .iter()
        .map(|&p| demand_at_least(p).min(supply_at_most(p)))
        .max()
        .unwrap_or(0);
    if q0 == 0 {
        return (0, None);
    }
    let clearing: Vec<f64> = candidates
        .iter()
        .copied()
        .filter(|&p| {
            demand_above(p) <= q0 && q0 <= demand_at_least(p) && supply_below(p) <= q0 && q0 <= supply_at_most(p)
        })
        .collect();
    let lo = clearing.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = clearing.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (q0, Some((lo, hi)))
}

/// Maximum total surplus `Σ (b − s)` over all matchings of buyers to
/// sellers, by dynamic programming over subsets of sellers.
pub fn max_surplus(buyers: &[f64], sellers: &[f64]) -> f64 {
    assert!(sellers.len() <= 16);
    let full = 1usize << sellers.len();
    let mut best = vec![f64::NEG_INFINITY; full];
    best[0] = 0.0;
    for &b in buyers {
        let mut next = best.clone();
        for (mask, &here) in best.iter().enumerate() {
            if here == f64::NEG_INFINITY {
                continue;
            }
            for (j, &s) in sellers.iter().enumerate() {
                if mask & (1 << j) == 0 && b >= s {
                    let m = mask | (1 << j);
                    next[m] = next[m].max(here + (b - s));
                }
            }
        }
        best = next;
    }
    best.into_iter().fold(0.0, f64::max)
}

pub fn rms(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
