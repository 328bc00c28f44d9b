//! Small dense helpers shared by the basic-solution reductions.

pub const PIVOT_TOL: f64 = 1e-12;

/// Nonzero `d` with `sum_t d_t cols[t] = 0`, found by row reduction.
///
/// Needs more columns than rows to be guaranteed; returns `None` when the
/// reduced system has no free column or the result fails a residual check.
pub fn null_vector(cols: &[Vec<f64>]) -> Option<Vec<f64>> {
    let p = cols.len();
    if p == 0 {
        return None;
    }
    let n = cols[0].len();
    let scale = cols.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = PIVOT_TOL * scale;
    // row-major working copy
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut free = None;
    let mut row = 0;
    for col in 0..p {
        if row == n {
            free.get_or_insert(col);
            break;
        }
        let (best, val) = (row..n)
            .map(|r| (r, m[r][col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            free.get_or_insert(col);
            continue;
        }
        m.swap(row, best);
        let inv = 1.0 / m[row][col];
        for v in m[row].iter_mut() {
            *v *= inv;
        }
        for r in 0..n {
            if r != row && m[r][col] != 0.0 {
                let f = m[r][col];
                let (src, dst) = if r < row {
                    let (lo, hi) = m.split_at_mut(row);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = m.split_at_mut(r);
                    (&lo[row], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= f * s;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let f = free?;
    let mut d = vec![0.0; p];
    d[f] = 1.0;
    for (r, &pc) in pivots.iter().enumerate() {
        d[pc] = -m[r][f];
    }
    let norm = d.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let resid = (0..n)
        .map(|i| {
            cols.iter()
                .zip(&d)
                .map(|(c, dt)| c[i] * dt)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0_f64, f64::max);
    (resid <= 1e-9 * scale * norm.max(1.0)).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_null_vectors() {
        let d = null_vector(&[vec![1.0], vec![1.0]]).unwrap();
        assert!((d[0] + d[1]).abs() < 1e-12);
        let d = null_vector(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(d, vec![1.0, 0.0, 0.0]);
        let cols = vec![vec![1.0, 2.0], vec![3.0, -1.0], vec![0.5, 0.5]];
        let d = null_vector(&cols).unwrap();
        for i in 0..2 {
            let s: f64 = cols.iter().zip(&d).map(|(c, x)| c[i] * x).sum();
            assert!(s.abs() < 1e-12);
        }
    }
}
