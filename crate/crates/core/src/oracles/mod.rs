//! Dual separation oracles for the packing families.

pub mod knapsack;

pub use knapsack::{knapsack_fptas, knapsack_select, CAPACITY_TOL};

use crate::covering::{Pattern, PatternFamily, PatternKind};

const TIE_TOL: f64 = 1e-12;

/// `a` beats `b` if its ratio is larger, or equal and its item set is smaller.
fn better(a: (&[usize], f64), b: (&[usize], f64)) -> bool {
    if a.1 > b.1 * (1.0 + TIE_TOL) + f64::MIN_POSITIVE {
        return true;
    }
    if b.1 > a.1 * (1.0 + TIE_TOL) + f64::MIN_POSITIVE {
        return false;
    }
    a.0 < b.0
}

/// Best of the knapsack bin (cost 1) and the best single rejection `y_i / pi_i`.
pub fn bpr_oracle(y: &[f64], sizes: &[f64], rejection_costs: &[f64], eps: f64) -> (Pattern, f64) {
    let (set, value) = knapsack_select(y, sizes, eps, None);
    let mut best = (Pattern::bin(set), value);
    if value == 0.0 && y.iter().all(|&v| v == 0.0) {
        return best;
    }
    for (i, (&yi, &pi)) in y.iter().zip(rejection_costs).enumerate() {
        let ratio = yi / pi;
        if better((&[i], ratio), (&best.0.items, best.1)) {
            best = (Pattern::new(vec![i], pi, PatternKind::Reject), ratio);
        }
    }
    best
}

/// For every distinct position `p_k`, knapsack over `{i : p_i <= p_k}`; the
/// pattern costs its largest position.
pub fn train_oracle(y: &[f64], sizes: &[f64], positions: &[f64], eps: f64) -> (Pattern, f64) {
    let mut thresholds: Vec<f64> = positions.to_vec();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let mut best: Option<(Pattern, f64)> = None;
    for &pk in &thresholds {
        let allowed: Vec<bool> = positions.iter().map(|&p| p <= pk).collect();
        let (set, value) = knapsack_select(y, sizes, eps, Some(&allowed));
        if set.is_empty() {
            continue;
        }
        let cost = set.iter().map(|&i| positions[i]).fold(0.0, f64::max);
        let ratio = value / cost;
        if best
            .as_ref()
            .is_none_or(|(p, r)| better((&set, ratio), (&p.items, *r)))
        {
            best = Some((Pattern::new(set, cost, PatternKind::Bin), ratio));
        }
    }
    best.unwrap_or_else(|| (Pattern::bin(Vec::new()), 0.0))
}

/// Plain bin packing: every pattern costs one.
#[derive(Debug, Clone)]
pub struct BinPackingFamily {
    pub sizes: Vec<f64>,
}

impl PatternFamily for BinPackingFamily {
    fn n_elements(&self) -> usize {
        self.sizes.len()
    }
    fn separate(&self, prices: &[f64], eps: f64) -> Pattern {
        knapsack_fptas(prices, &self.sizes, eps)
    }
    fn min_cost(&self) -> f64 {
        1.0
    }
}

/// Bin packing with rejection.
#[derive(Debug, Clone)]
pub struct BprFamily {
    pub sizes: Vec<f64>,
    pub rejection_costs: Vec<f64>,
}

impl PatternFamily for BprFamily {
    fn n_elements(&self) -> usize {
        self.sizes.len()
    }
    fn separate(&self, prices: &[f64], eps: f64) -> Pattern {
        bpr_oracle(prices, &self.sizes, &self.rejection_costs, eps).0
    }
    fn min_cost(&self) -> f64 {
        self.rejection_costs.iter().copied().fold(1.0, f64::min)
    }
}

/// Train delivery: a tour costs the farthest position it visits.
#[derive(Debug, Clone)]
pub struct TrainFamily {
    pub sizes: Vec<f64>,
    pub positions: Vec<f64>,
}

impl PatternFamily for TrainFamily {
    fn n_elements(&self) -> usize {
        self.sizes.len()
    }
    fn separate(&self, prices: &[f64], eps: f64) -> Pattern {
        train_oracle(prices, &self.sizes, &self.positions, eps).0
    }
    fn min_cost(&self) -> f64 {
        self.positions.iter().copied().fold(1.0, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpr_examples() {
        let (p, r) = bpr_oracle(&[1.0], &[0.9], &[0.1], 0.1);
        assert_eq!(p.kind, PatternKind::Reject);
        assert!((r - 10.0).abs() < 1e-12);

        let (p, r) = bpr_oracle(&[1.0, 1.0], &[0.4, 0.4], &[0.9, 0.9], 0.1);
        assert_eq!(p.kind, PatternKind::Bin);
        assert_eq!(p.items, vec![0, 1]);
        assert_eq!(r, 2.0);

        let (p, r) = bpr_oracle(&[0.0, 0.0], &[0.4, 0.4], &[0.9, 0.9], 0.1);
        assert!(p.items.is_empty());
        assert_eq!(r, 0.0);
    }

    #[test]
    fn train_examples() {
        let (p, r) = train_oracle(&[2.0], &[0.5], &[0.5], 0.1);
        assert_eq!(p.items, vec![0]);
        assert!((r - 4.0).abs() < 1e-12);

        let (p, r) = train_oracle(&[1.0, 1.0], &[0.4, 0.4], &[0.1, 1.0], 0.1);
        assert_eq!(p.items, vec![0]);
        assert!((r - 10.0).abs() < 1e-12);
        assert!((p.cost - 0.1).abs() < 1e-15);
    }
}
