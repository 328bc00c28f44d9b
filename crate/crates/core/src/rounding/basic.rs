use rand::Rng;
use serde::{Deserialize, Serialize};

use super::instance::RoundingInstance;
use crate::linalg::null_vector;

/// Entries this close to 0 or 1 are snapped and treated as integral.
pub const INTEGRAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicReduction {
    pub z: Vec<f64>,
    pub fractional: usize,
    /// Elimination broke down; `z` is the input unchanged.
    pub degenerate: bool,
}

fn is_fractional(v: f64) -> bool {
    v > INTEGRAL_TOL && v < 1.0 - INTEGRAL_TOL
}

/// Basic solution with the same `A` and `B` row sums, pushing along null
/// directions always in the `+` direction.
pub fn reduce_to_basic(inst: &RoundingInstance) -> BasicReduction {
    reduce(inst, None::<&mut rand_chacha::ChaCha8Rng>)
}

/// Randomized variant: each move goes `+t1` with probability `t2/(t1+t2)` and
/// `-t2` otherwise, so `E[z] = x`.
pub fn reduce_to_basic_with_rng<R: Rng + ?Sized>(
    inst: &RoundingInstance,
    rng: &mut R,
) -> BasicReduction {
    reduce(inst, Some(rng))
}

fn reduce<R: Rng + ?Sized>(inst: &RoundingInstance, mut rng: Option<&mut R>) -> BasicReduction {
    let n = inst.n_rows();
    let rows: Vec<&[f64]> = inst.a.rows().chain(inst.b.rows()).collect();
    let mut z: Vec<f64> = inst
        .x
        .iter()
        .map(|&v| {
            if v <= INTEGRAL_TOL {
                0.0
            } else if v >= 1.0 - INTEGRAL_TOL {
                1.0
            } else {
                v
            }
        })
        .collect();
    loop {
        let frac: Vec<usize> = (0..z.len()).filter(|&j| is_fractional(z[j])).collect();
        if frac.len() <= n {
            return BasicReduction {
                fractional: frac.len(),
                z,
                degenerate: false,
            };
        }
        let block = &frac[..n + 1];
        let cols: Vec<Vec<f64>> = block
            .iter()
            .map(|&j| rows.iter().map(|r| r[j]).collect())
            .collect();
        let Some(d) = null_vector(&cols) else {
            return BasicReduction {
                fractional: (0..inst.x.len())
                    .filter(|&j| is_fractional(inst.x[j]))
                    .count(),
                z: inst.x.clone(),
                degenerate: true,
            };
        };
        // limit of each coordinate in the + and - directions
        let limits: Vec<(f64, f64)> = block
            .iter()
            .zip(&d)
            .map(|(&j, &dj)| {
                if dj > 0.0 {
                    ((1.0 - z[j]) / dj, z[j] / dj)
                } else if dj < 0.0 {
                    (z[j] / -dj, (1.0 - z[j]) / -dj)
                } else {
                    (f64::INFINITY, f64::INFINITY)
                }
            })
            .collect();
        let argmin = |pick: fn(&(f64, f64)) -> f64| {
            (0..limits.len()).fold(0, |b, t| {
                if pick(&limits[t]) < pick(&limits[b]) {
                    t
                } else {
                    b
                }
            })
        };
        let (iu, id) = (argmin(|l| l.0), argmin(|l| l.1));
        let (up, down) = (limits[iu].0, limits[id].1);
        let go_down = match rng.as_deref_mut() {
            Some(r) => r.random::<f64>() * (up + down) < up,
            None => false,
        };
        let (t, hit) = if go_down { (-down, id) } else { (up, iu) };
        for (pos, (&j, &dj)) in block.iter().zip(&d).enumerate() {
            let v = (z[j] + t * dj).clamp(0.0, 1.0);
            z[j] = if pos == hit || !is_fractional(v) {
                v.round()
            } else {
                v
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{DenseMatrix, DiscrepancyBounds};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ones_row(x: Vec<f64>) -> RoundingInstance {
        let m = x.len();
        RoundingInstance::new(
            DenseMatrix::from_rows(&[vec![1.0; m]], m).unwrap(),
            DenseMatrix::empty(m),
            DiscrepancyBounds::new(vec![1.0]).unwrap(),
            vec![],
            vec![0.0; m],
            x,
        )
        .unwrap()
    }

    #[test]
    fn integral_is_unchanged() {
        let r = reduce_to_basic(&ones_row(vec![1.0, 0.0, 1.0]));
        assert_eq!(r.z, vec![1.0, 0.0, 1.0]);
        assert_eq!(r.fractional, 0);
    }

    #[test]
    fn three_halves() {
        let r = reduce_to_basic(&ones_row(vec![0.5; 3]));
        assert!(!r.degenerate);
        assert!(r.fractional <= 1);
        assert!((r.z.iter().sum::<f64>() - 1.5).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let r = reduce_to_basic_with_rng(&ones_row(vec![0.5; 3]), &mut rng);
            assert!(r.fractional <= 1);
            assert!((r.z.iter().sum::<f64>() - 1.5).abs() < 1e-9);
        }
    }

    #[test]
    fn randomized_preserves_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = vec![0.3, 0.8, 0.1, 0.55];
        let n = 20_000;
        let mut mean = [0.0; 4];
        for _ in 0..n {
            let r = reduce_to_basic_with_rng(&ones_row(x.clone()), &mut rng);
            for (m, z) in mean.iter_mut().zip(&r.z) {
                *m += z / n as f64;
            }
        }
        for (m, x) in mean.iter().zip(&x) {
            assert!((m - x).abs() < 0.02, "{m} vs {x}");
        }
    }
}
