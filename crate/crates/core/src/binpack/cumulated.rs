use serde::{Deserialize, Serialize};

use crate::covering::Pattern;
use crate::matrix::{DenseMatrix, DiscrepancyBounds};

/// `A_{iS} = |S ∩ {rows up to i}|` over a chosen list of items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulatedMatrix {
    pub matrix: DenseMatrix,
    /// Item behind each row.
    pub rows: Vec<usize>,
    /// Sum of the column maxima.
    pub sigma: f64,
    /// Largest column maximum.
    pub beta: f64,
}

impl CumulatedMatrix {
    /// `(sigma, beta)` recomputed from the entries.
    pub fn column_stats(m: &DenseMatrix) -> (f64, f64) {
        let mut sigma = 0.0;
        let mut beta: f64 = 0.0;
        for j in 0..m.n_cols() {
            let b = (0..m.n_rows()).map(|i| m[(i, j)]).fold(0.0, f64::max);
            sigma += b;
            beta = beta.max(b);
        }
        (sigma, beta)
    }
}

/// Rows follow `items` (sorted by index); `Delta_i = c / s_i`.
pub fn cumulated_matrix(
    patterns: &[Pattern],
    sizes: &[f64],
    items: &[usize],
    c: f64,
) -> (CumulatedMatrix, DiscrepancyBounds) {
    let m = patterns.len();
    let mut entries = Vec::with_capacity(items.len() * m);
    let mut running = vec![0.0; m];
    for &i in items {
        for (acc, p) in running.iter_mut().zip(patterns) {
            if p.contains(i) {
                *acc += 1.0;
            }
        }
        entries.extend_from_slice(&running);
    }
    let matrix = DenseMatrix::from_row_major(items.len(), m, entries).expect("entry count matches");
    let (sigma, beta) = CumulatedMatrix::column_stats(&matrix);
    let delta = DiscrepancyBounds::new(items.iter().map(|&i| c / sizes[i]).collect())
        .expect("sizes are positive");
    (
        CumulatedMatrix {
            matrix,
            rows: items.to_vec(),
            sigma,
            beta,
        },
        delta,
    )
}

/// `C_L sigma beta / Delta^2`.
pub fn entropy_budget_bound(m: &CumulatedMatrix, delta: f64, c_l: f64) -> f64 {
    c_l * m.sigma * m.beta / (delta * delta)
}

/// `(1/10) sum_S sum_{i in S, i in items} s_i`.
pub fn size_budget(patterns: &[Pattern], sizes: &[f64], items: &[usize]) -> f64 {
    let total: f64 = patterns
        .iter()
        .flat_map(|p| p.items.iter())
        .filter(|i| items.contains(i))
        .map(|&i| sizes[i])
        .sum();
    total / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_patterns() {
        let pats = [Pattern::bin(vec![0, 1]), Pattern::bin(vec![1, 2])];
        let (m, d) = cumulated_matrix(&pats, &[0.5, 0.4, 0.25], &[0, 1, 2], 1.0);
        let col = |j: usize| (0..3).map(|i| m.matrix[(i, j)]).collect::<Vec<_>>();
        assert_eq!(col(0), vec![1.0, 2.0, 2.0]);
        assert_eq!(col(1), vec![0.0, 1.0, 2.0]);
        assert_eq!((m.sigma, m.beta), (4.0, 2.0));
        assert_eq!(d.as_slice(), &[2.0, 2.5, 4.0]);
        assert_eq!(entropy_budget_bound(&m, 2.0, 1.0), 2.0);
    }

    #[test]
    fn empty_pattern_column() {
        let (m, _) = cumulated_matrix(&[Pattern::bin(vec![])], &[0.5, 0.5], &[0, 1], 1.0);
        assert_eq!(m.matrix.max_abs(), 0.0);
        assert_eq!(entropy_budget_bound(&m, 1.0, 3.0), 0.0);
    }
}
