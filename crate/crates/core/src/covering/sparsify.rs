use serde::{Deserialize, Serialize};

use super::{Pattern, SparseSolution};
use crate::linalg::null_vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifyOutcome {
    pub solution: SparseSolution,
    /// Elimination failed; `solution` is the merged input.
    pub degenerate: bool,
}

/// Cuts the support to at most `n` patterns without changing any coverage
/// and without raising the cost.
pub fn sparsify_to_basic(x: &SparseSolution, n: usize) -> SparsifyOutcome {
    let merged = SparseSolution::from_entries(x.entries().iter().cloned());
    let mut entries: Vec<(Pattern, f64)> = merged.entries().to_vec();
    while entries.len() > n {
        let block = &entries[..n + 1];
        let cols: Vec<Vec<f64>> = block
            .iter()
            .map(|(p, _)| {
                let mut c = vec![0.0; n];
                for &i in &p.items {
                    c[i] = 1.0;
                }
                c
            })
            .collect();
        let Some(mut d) = null_vector(&cols) else {
            return SparsifyOutcome {
                solution: merged,
                degenerate: true,
            };
        };
        // x -= t d must not raise the cost: orient so that c^T d >= 0
        let cd: f64 = block.iter().zip(&d).map(|((p, _), v)| p.cost * v).sum();
        let scale = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if cd < -1e-12 * scale || (cd.abs() <= 1e-12 * scale && d.iter().all(|&v| v <= 0.0)) {
            d.iter_mut().for_each(|v| *v = -*v);
        }
        let (hit, t) = block
            .iter()
            .zip(&d)
            .enumerate()
            .filter(|(_, (_, &dv))| dv > 0.0)
            .map(|(k, ((_, w), &dv))| (k, w / dv))
            .fold(
                (usize::MAX, f64::INFINITY),
                |b, c| if c.1 < b.1 { c } else { b },
            );
        if hit == usize::MAX {
            return SparsifyOutcome {
                solution: merged,
                degenerate: true,
            };
        }
        for (k, ((_, w), dv)) in entries.iter_mut().zip(&d).enumerate() {
            *w = if k == hit {
                0.0
            } else {
                (*w - t * dv).max(0.0)
            };
        }
        entries.retain(|(_, w)| *w > 1e-15);
    }
    SparsifyOutcome {
        solution: SparseSolution::from_entries(entries),
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_support_unchanged() {
        let x = SparseSolution::from_entries([(Pattern::bin(vec![0, 1]), 1.0)]);
        assert_eq!(sparsify_to_basic(&x, 2).solution, x);
    }

    #[test]
    fn random_six_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let entries: Vec<(Pattern, f64)> = (0..10)
                .map(|_| {
                    let items: Vec<usize> = (0..6).filter(|_| rng.random_bool(0.4)).collect();
                    let items = if items.is_empty() {
                        vec![rng.random_range(0..6)]
                    } else {
                        items
                    };
                    (
                        Pattern::new(
                            items,
                            rng.random_range(0.2..1.0),
                            super::super::PatternKind::Bin,
                        ),
                        rng.random_range(0.05..1.0),
                    )
                })
                .collect();
            let x = SparseSolution::from_entries(entries);
            let out = sparsify_to_basic(&x, 6);
            assert!(!out.degenerate);
            assert!(out.solution.support() <= 6);
            assert!(out.solution.objective() <= x.objective() + 1e-9);
            for (a, b) in out.solution.coverage(6).iter().zip(x.coverage(6)) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
