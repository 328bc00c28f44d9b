//! Column-generation solver for covering LPs over implicit pattern families.

pub mod master;
pub mod mw;
pub mod pattern_lp;
pub mod sparsify;

use serde::{Deserialize, Serialize};

pub use mw::{mw_cover, CoverOutcome, CoverProblem, CoverStats, DEFAULT_CALL_CAP};
pub use pattern_lp::{
    solve_pattern_lp, solve_pattern_lp_with, PatternLpOptions, PatternLpSolution,
};
pub use sparsify::{sparsify_to_basic, SparsifyOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    /// A bin (or tour) holding the items.
    Bin,
    /// Rejection of a single item.
    Reject,
}

/// A set of items with a cost in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub items: Vec<usize>,
    pub cost: f64,
    pub kind: PatternKind,
}

impl Pattern {
    /// Sorts and deduplicates `items`.
    pub fn new(mut items: Vec<usize>, cost: f64, kind: PatternKind) -> Self {
        items.sort_unstable();
        items.dedup();
        Self { items, cost, kind }
    }

    pub fn bin(items: Vec<usize>) -> Self {
        Self::new(items, 1.0, PatternKind::Bin)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.items.binary_search(&i).is_ok()
    }

    pub fn same_columns(&self, other: &Self) -> bool {
        self.kind == other.kind && self.items == other.items && self.cost == other.cost
    }

    /// `sum_{i in S} y_i / c_S`.
    pub fn ratio(&self, prices: &[f64]) -> f64 {
        self.items.iter().map(|&i| prices[i]).sum::<f64>() / self.cost
    }
}

/// Positive weights on patterns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "SolutionRepr", into = "SolutionRepr")]
pub struct SparseSolution {
    entries: Vec<(Pattern, f64)>,
}

#[derive(Serialize, Deserialize)]
struct WeightedPattern {
    #[serde(flatten)]
    pattern: Pattern,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct SolutionRepr {
    patterns: Vec<WeightedPattern>,
    #[serde(default)]
    objective: f64,
}

impl TryFrom<SolutionRepr> for SparseSolution {
    type Error = crate::error::InputError;

    fn try_from(r: SolutionRepr) -> Result<Self, Self::Error> {
        if let Some(w) = r
            .patterns
            .iter()
            .find(|w| !(w.weight.is_finite() && w.weight >= 0.0))
        {
            return Err(crate::error::InputError::Range(format!(
                "pattern weight {}",
                w.weight
            )));
        }
        Ok(Self::from_entries(
            r.patterns.into_iter().map(|w| (w.pattern, w.weight)),
        ))
    }
}

impl From<SparseSolution> for SolutionRepr {
    fn from(s: SparseSolution) -> Self {
        let objective = s.objective();
        Self {
            patterns: s
                .entries
                .into_iter()
                .map(|(pattern, weight)| WeightedPattern { pattern, weight })
                .collect(),
            objective,
        }
    }
}

impl SparseSolution {
    /// Merges equal patterns and drops non-positive weights. Order of first appearance is kept.
    pub fn from_entries<I: IntoIterator<Item = (Pattern, f64)>>(entries: I) -> Self {
        let mut out: Vec<(Pattern, f64)> = Vec::new();
        for (p, w) in entries {
            match out.iter_mut().find(|(q, _)| q.same_columns(&p)) {
                Some((_, acc)) => *acc += w,
                None => out.push((p, w)),
            }
        }
        out.retain(|(_, w)| *w > 0.0);
        Self { entries: out }
    }

    pub fn entries(&self) -> &[(Pattern, f64)] {
        &self.entries
    }

    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn objective(&self) -> f64 {
        self.entries.iter().map(|(p, w)| p.cost * w).sum()
    }

    /// `sum_{S ∋ i} x_S` for every element.
    pub fn coverage(&self, n: usize) -> Vec<f64> {
        let mut cov = vec![0.0; n];
        for (p, w) in &self.entries {
            for &i in &p.items {
                cov[i] += w;
            }
        }
        cov
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_entries(self.entries.iter().map(|(p, w)| (p.clone(), w * factor)))
    }
}

/// A set system given only through its dual separation oracle.
pub trait PatternFamily: Sync {
    fn n_elements(&self) -> usize;

    /// Pattern with `ratio(y) >= (1 - eps) * max` over all patterns.
    fn separate(&self, prices: &[f64], eps: f64) -> Pattern;

    /// Smallest possible pattern cost; bounds the width.
    fn min_cost(&self) -> f64;
}
