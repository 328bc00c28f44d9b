//! Restricted master: `max t` subject to `sum_S w_S a_S >= t 1`, `w` in the simplex.
//!
//! Solved through `max 1^T pi` s.t. `a_S^T pi <= 1`, `pi >= 0` by a tableau
//! simplex with Bland's rule; the slack reduced costs give the primal weights.

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub value: f64,
    /// Convex weights on the columns.
    pub weights: Vec<f64>,
    /// Dual prices on the elements, summing to one.
    pub prices: Vec<f64>,
}

/// `cols[s][i]` is the coverage column `s` gives element `i` at full weight.
/// Returns `None` if some element is in no column.
pub fn solve_master(cols: &[Vec<f64>], n: usize) -> Option<MasterSolution> {
    let p = cols.len();
    if p == 0 || (0..n).any(|i| cols.iter().all(|c| c[i] <= 0.0)) {
        return None;
    }
    let width = n + p + 1;
    let rhs = n + p;
    let mut t: Vec<Vec<f64>> = (0..p)
        .map(|s| {
            let mut row = vec![0.0; width];
            row[..n].copy_from_slice(&cols[s]);
            row[n + s] = 1.0;
            row[rhs] = 1.0;
            row
        })
        .collect();
    let mut z = vec![0.0; width];
    z[..n].iter_mut().for_each(|v| *v = -1.0);
    let mut basis: Vec<usize> = (n..n + p).collect();

    let max_pivots = 50 * (n + p) + 1000;
    for _ in 0..max_pivots {
        let Some(enter) = (0..n + p).find(|&j| z[j] < -TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..p {
            let a = t[r][enter];
            if a > TOL {
                let ratio = t[r][rhs] / a;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - TOL || (ratio <= best + TOL && basis[r] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let r = leave?;
        let piv = t[r][enter];
        t[r].iter_mut().for_each(|v| *v /= piv);
        let pivot_row = t[r].clone();
        for (q, row) in t.iter_mut().enumerate() {
            if q != r {
                let f = row[enter];
                if f != 0.0 {
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(v, pv)| *v -= f * pv);
                }
            }
        }
        let f = z[enter];
        z.iter_mut()
            .zip(&pivot_row)
            .for_each(|(v, pv)| *v -= f * pv);
        basis[r] = enter;
    }
    let total = z[rhs];
    if !(total > 0.0) {
        return None;
    }
    let mut pi = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            pi[b] = t[r][rhs];
        }
    }
    let weights: Vec<f64> = (0..p).map(|s| z[n + s].max(0.0) / total).collect();
    let wsum: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / wsum).collect();
    let psum: f64 = pi.iter().sum();
    let prices = pi.iter().map(|v| v / psum).collect();
    // recompute the value from the weights rather than trusting the tableau
    let value = (0..n)
        .map(|i| {
            cols.iter()
                .zip(&weights)
                .map(|(c, w)| c[i] * w)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    Some(MasterSolution {
        value,
        weights,
        prices,
    })
}
