use serde::{Deserialize, Serialize};

use super::master::solve_master;
use super::{Pattern, PatternFamily, SparseSolution};
use crate::error::{CoverError, InputError};

/// Practical ceiling on oracle calls per budget probe.
pub const DEFAULT_CALL_CAP: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverProblem {
    pub n: usize,
    pub r: f64,
    pub eps: f64,
    pub rho: f64,
}

impl CoverProblem {
    pub fn new(n: usize, r: f64, eps: f64, rho: f64) -> Result<Self, InputError> {
        if n == 0 {
            return Err(InputError::Range("no elements to cover".into()));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(InputError::Range(format!(
                "budget r = {r} must be positive"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(InputError::Range(format!("eps = {eps} outside (0, 1)")));
        }
        if !(rho >= 1.0) {
            return Err(InputError::Range(format!("width rho = {rho} below 1")));
        }
        Ok(Self { n, r, eps, rho })
    }

    /// `10 (n + rho ln^2 n + (rho / eps^2) ln(n / eps))`.
    pub fn k_max(&self) -> usize {
        let n = self.n as f64;
        let ln_n = n.max(2.0).ln();
        let k = 10.0
            * (n + self.rho * ln_n * ln_n + self.rho / (self.eps * self.eps) * (n / self.eps).ln());
        k.min(usize::MAX as f64) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoverOutcome {
    /// `Sigma c_S x_S = r` and every element covered at least `1 - eps`.
    Feasible(SparseSolution),
    /// No `x` with budget `r` covers every element fully.
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoverStats {
    pub oracle_calls: usize,
    pub rounds: usize,
    pub columns: usize,
    pub min_coverage: f64,
}

/// Covering with an approximate separation oracle.
///
/// Each round solves the master problem over the columns found so far, then
/// asks the oracle twice: once at the master's dual prices and once at the
/// exponential prices `exp(-eta (cov_i - min cov))`, `eta = ln(n)/eps`.
/// Infeasibility is certified when `r * ratio / (1 - eps/2) < 1` at the dual
/// prices, or when neither call produces a new column.
pub fn mw_cover<F: PatternFamily + ?Sized>(
    problem: &CoverProblem,
    family: &F,
    call_cap: usize,
) -> Result<(CoverOutcome, CoverStats), CoverError> {
    let n = problem.n;
    if family.n_elements() != n {
        return Err(InputError::Dimension(format!(
            "family has {} elements, problem has {n}",
            family.n_elements()
        ))
        .into());
    }
    let limit = problem.k_max().min(call_cap).max(n + 2);
    let oracle_eps = problem.eps / 2.0;
    let eta = (n.max(2) as f64).ln() / problem.eps;
    let mut stats = CoverStats::default();
    let mut cols: Vec<Pattern> = Vec::new();

    let push = |cols: &mut Vec<Pattern>, p: Pattern| -> bool {
        if p.items.is_empty() || cols.iter().any(|q| q.same_columns(&p)) {
            return false;
        }
        cols.push(p);
        true
    };

    // seed with one column per element
    for i in 0..n {
        if cols.iter().any(|p| p.contains(i)) {
            continue;
        }
        let mut y = vec![0.0; n];
        y[i] = 1.0;
        let p = family.separate(&y, oracle_eps);
        stats.oracle_calls += 1;
        if !p.contains(i) {
            return Ok((CoverOutcome::Infeasible, stats));
        }
        push(&mut cols, p);
    }

    let mut best: Option<(f64, SparseSolution)> = None;
    loop {
        stats.rounds += 1;
        stats.columns = cols.len();
        let a: Vec<Vec<f64>> = cols
            .iter()
            .map(|p| {
                let mut c = vec![0.0; n];
                for &i in &p.items {
                    c[i] = problem.r / p.cost;
                }
                c
            })
            .collect();
        let Some(master) = solve_master(&a, n) else {
            return Ok((CoverOutcome::Infeasible, stats));
        };
        let solution = SparseSolution::from_entries(
            cols.iter()
                .zip(&master.weights)
                .map(|(p, w)| (p.clone(), w * problem.r / p.cost)),
        );
        stats.min_coverage = master.value;
        if best.as_ref().is_none_or(|(v, _)| master.value > *v) {
            best = Some((master.value, solution.clone()));
        }
        if master.value >= 1.0 - problem.eps {
            return Ok((CoverOutcome::Feasible(solution), stats));
        }
        if stats.oracle_calls + 2 > limit {
            let (best_coverage, best) = best.expect("at least one round ran");
            return Err(CoverError::IterationLimit {
                limit,
                best_coverage,
                best,
            });
        }

        let s1 = family.separate(&master.prices, oracle_eps);
        stats.oracle_calls += 1;
        let ratio = s1.ratio(&master.prices);
        if problem.r * ratio / (1.0 - oracle_eps) < 1.0 - 1e-12 {
            return Ok((CoverOutcome::Infeasible, stats));
        }

        let cov = solution.coverage(n);
        let low = cov.iter().copied().fold(f64::INFINITY, f64::min);
        let mut y: Vec<f64> = cov.iter().map(|c| (-eta * (c - low)).exp()).collect();
        let total: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= total);
        let s2 = family.separate(&y, oracle_eps);
        stats.oracle_calls += 1;

        let added = push(&mut cols, s1) | push(&mut cols, s2);
        if !added {
            // the oracle only returns known columns, so the optimum over P is
            // at most value / (1 - eps/2) < 1
            return Ok((CoverOutcome::Infeasible, stats));
        }
    }
}
