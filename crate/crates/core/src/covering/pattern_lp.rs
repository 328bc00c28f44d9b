use serde::{Deserialize, Serialize};

use super::mw::{mw_cover, CoverOutcome, CoverProblem, DEFAULT_CALL_CAP};
use super::sparsify::sparsify_to_basic;
use super::{PatternFamily, SparseSolution};
use crate::error::{CoverError, InputError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternLpOptions {
    pub delta: f64,
    pub call_cap: usize,
}

impl PatternLpOptions {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            call_cap: DEFAULT_CALL_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternLpSolution {
    pub solution: SparseSolution,
    pub objective: f64,
    /// Smallest grid budget found feasible.
    pub r: f64,
    pub eps: f64,
    pub probes: usize,
    pub oracle_calls: usize,
    pub degenerate: bool,
}

/// Fractional cover of cost at most `OPT_f + delta` with support at most `n`.
pub fn solve_pattern_lp<F: PatternFamily + ?Sized>(
    family: &F,
    delta: f64,
) -> Result<PatternLpSolution, CoverError> {
    solve_pattern_lp_with(family, PatternLpOptions::new(delta))
}

/// Binary search over the budgets `r = k delta / 2`, `eps = delta / (4n)`.
/// A probe that hits the call limit counts as infeasible.
pub fn solve_pattern_lp_with<F: PatternFamily + ?Sized>(
    family: &F,
    opts: PatternLpOptions,
) -> Result<PatternLpSolution, CoverError> {
    let n = family.n_elements();
    if n == 0 {
        return Err(InputError::Range("no elements".into()).into());
    }
    if !(opts.delta > 0.0 && opts.delta.is_finite()) {
        return Err(InputError::Range(format!("delta = {} must be positive", opts.delta)).into());
    }
    let step = opts.delta / 2.0;
    let eps = (opts.delta / (4.0 * n as f64)).min(0.5);
    let min_cost = family.min_cost().clamp(f64::MIN_POSITIVE, 1.0);
    let mut probes = 0;
    let mut calls = 0;

    let mut probe = |k: usize| -> Result<Option<SparseSolution>, CoverError> {
        let r = k as f64 * step;
        let pb = CoverProblem::new(n, r, eps, (r / min_cost).max(1.0))?;
        probes += 1;
        match mw_cover(&pb, family, opts.call_cap) {
            Ok((CoverOutcome::Feasible(x), st)) => {
                calls += st.oracle_calls;
                Ok(Some(x))
            }
            Ok((CoverOutcome::Infeasible, st)) => {
                calls += st.oracle_calls;
                Ok(None)
            }
            Err(CoverError::IterationLimit { limit, .. }) => {
                calls += limit;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };

    let k_hi = (n as f64 / step).ceil() as usize;
    let Some(mut best) = probe(k_hi)? else {
        return Err(CoverError::NoFeasibleBudget {
            max_budget: k_hi as f64 * step,
        });
    };
    let (mut lo, mut hi) = (0usize, k_hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match probe(mid)? {
            Some(x) => {
                hi = mid;
                best = x;
            }
            None => lo = mid,
        }
    }
    let low = best.coverage(n).into_iter().fold(f64::INFINITY, f64::min);
    let scaled = best.scaled(1.0 / low);
    let sparse = sparsify_to_basic(&scaled, n);
    Ok(PatternLpSolution {
        objective: sparse.solution.objective(),
        solution: sparse.solution,
        r: hi as f64 * step,
        eps,
        probes,
        oracle_calls: calls,
        degenerate: sparse.degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{BinPackingFamily, BprFamily};

    #[test]
    fn spec_like_values() {
        let d = 0.05;
        let one = solve_pattern_lp(&BinPackingFamily { sizes: vec![0.6] }, d).unwrap();
        assert!((one.objective - 1.0).abs() <= d);
        assert_eq!(one.solution.support(), 1);

        let two = solve_pattern_lp(
            &BinPackingFamily {
                sizes: vec![0.5, 0.5],
            },
            d,
        )
        .unwrap();
        assert!((two.objective - 1.0).abs() <= d);

        let bpr = BprFamily {
            sizes: vec![0.6; 3],
            rejection_costs: vec![0.4; 3],
        };
        let s = solve_pattern_lp(&bpr, d).unwrap();
        assert!((s.objective - 1.2).abs() <= d, "{}", s.objective);
        assert!(s.solution.coverage(3).iter().all(|&c| c >= 1.0 - 1e-9));
        assert!(s.solution.support() <= 3);
    }

    #[test]
    fn three_pairs_value() {
        // any two of six 0.4 items fit, three do not
        let s = solve_pattern_lp(
            &BinPackingFamily {
                sizes: vec![0.4, 0.4, 0.4, 0.4, 0.4, 0.4],
            },
            0.05,
        )
        .unwrap();
        assert!((s.objective - 3.0).abs() <= 0.05, "{}", s.objective);
        let s = solve_pattern_lp(
            &BinPackingFamily {
                sizes: vec![0.6, 0.6, 0.6],
            },
            0.05,
        )
        .unwrap();
        assert!((s.objective - 3.0).abs() <= 0.05, "{}", s.objective);
        // pairs of three 0.45 items: each pair at weight 1/2
        let s = solve_pattern_lp(
            &BinPackingFamily {
                sizes: vec![0.45, 0.45, 0.45],
            },
            0.05,
        )
        .unwrap();
        assert!((s.objective - 1.5).abs() <= 0.05, "{}", s.objective);
    }
}
