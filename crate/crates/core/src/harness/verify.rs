//! Checkers that recompute everything from the raw data.

use serde::{Deserialize, Serialize};

use crate::binpack::{PackingInstance, PackingSolution};
use crate::covering::SparseSolution;

const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub feasible: bool,
    pub recomputed_cost: f64,
    pub problems: Vec<String>,
}

/// Item partition, bin loads and cost.
pub fn verify_solution(inst: &PackingInstance, sol: &PackingSolution) -> Verdict {
    let n = inst.sizes().len();
    let mut problems = Vec::new();
    let mut seen = vec![0usize; n];
    let mut cost = 0.0;
    let bins: Vec<&Vec<usize>> = sol
        .bins
        .iter()
        .chain(sol.extra_bins.iter().map(|b| &b.items))
        .collect();
    for (b, items) in bins.iter().enumerate() {
        let mut load = 0.0;
        let mut far: f64 = 0.0;
        for &i in items.iter() {
            if i >= n {
                problems.push(format!("bin {b}: item {i} out of range"));
                continue;
            }
            seen[i] += 1;
            load += inst.sizes()[i];
            if let Some(p) = inst.positions() {
                far = far.max(p[i]);
            }
        }
        if load > 1.0 + LOAD_TOL {
            problems.push(format!("bin {b}: load {load}"));
        }
        cost += if inst.positions().is_some() { far } else { 1.0 };
    }
    if !sol.rejected.is_empty() && inst.rejection_costs().is_none() {
        problems.push("rejections without rejection costs".into());
    }
    for &i in &sol.rejected {
        if i >= n {
            problems.push(format!("rejected item {i} out of range"));
            continue;
        }
        seen[i] += 1;
        if let Some(pi) = inst.rejection_costs() {
            cost += pi[i];
        }
    }
    for (i, &c) in seen.iter().enumerate() {
        if c != 1 {
            problems.push(format!("item {i} appears {c} times"));
        }
    }
    if (cost - sol.total_cost).abs() > 1e-9 * cost.max(1.0) {
        problems.push(format!(
            "stored cost {} but recomputed {cost}",
            sol.total_cost
        ));
    }
    Verdict {
        feasible: problems.is_empty(),
        recomputed_cost: cost,
        problems,
    }
}

/// Every element covered at least `1 - 1e-9`, every pattern within capacity.
pub fn verify_cover(inst: &PackingInstance, x: &SparseSolution) -> Verdict {
    let n = inst.sizes().len();
    let mut problems = Vec::new();
    let mut cov = vec![0.0; n];
    let mut cost = 0.0;
    for (k, (p, w)) in x.entries().iter().enumerate() {
        if p.items.iter().any(|&i| i >= n) {
            problems.push(format!("pattern {k}: item out of range"));
            continue;
        }
        let load: f64 = p.items.iter().map(|&i| inst.sizes()[i]).sum();
        if load > 1.0 + LOAD_TOL && p.items.len() > 1 {
            problems.push(format!("pattern {k}: load {load}"));
        }
        for &i in &p.items {
            cov[i] += w;
        }
        cost += p.cost * w;
    }
    for (i, c) in cov.iter().enumerate() {
        if *c < 1.0 - 1e-9 {
            problems.push(format!("item {i} covered {c}"));
        }
    }
    Verdict {
        feasible: problems.is_empty(),
        recomputed_cost: cost,
        problems,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binpack::PackingStats;

    fn sol(bins: Vec<Vec<usize>>, rejected: Vec<usize>, cost: f64) -> PackingSolution {
        PackingSolution {
            bins,
            rejected,
            extra_bins: vec![],
            total_cost: cost,
            stats: PackingStats::default(),
        }
    }

    #[test]
    fn catches_problems() {
        let inst = PackingInstance::bpr(vec![0.6, 0.6], vec![0.4, 0.4]).unwrap();
        assert!(verify_solution(&inst, &sol(vec![], vec![0, 1], 0.8)).feasible);
        assert!(!verify_solution(&inst, &sol(vec![vec![0, 1]], vec![], 1.0)).feasible);
        assert!(!verify_solution(&inst, &sol(vec![vec![0]], vec![], 1.0)).feasible);
        assert!(!verify_solution(&inst, &sol(vec![vec![0]], vec![1], 1.0)).feasible);
    }
}
