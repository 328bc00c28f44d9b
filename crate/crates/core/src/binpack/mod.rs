//! Bin packing with rejection and train delivery on top of the rounding engine.

pub mod cumulated;
pub mod pipeline;
pub mod slots;
pub mod small;

use serde::{Deserialize, Serialize};

pub use cumulated::{cumulated_matrix, entropy_budget_bound, size_budget, CumulatedMatrix};
pub use pipeline::{
    grade_index, solve_bin_packing, solve_bpr, solve_train, well_round, PackingConfig,
};
pub use slots::{
    assign_items_to_slots, check_deficits, repair_large, RepairOutcome, SlotAssignment,
};
pub use small::{assign_small_fractional, first_fit, SmallAssignment};

use crate::covering::PatternFamily;
use crate::error::InputError;
use crate::oracles::{BinPackingFamily, BprFamily, TrainFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Bp,
    Bpr,
    Train,
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Bp => "bp",
            Self::Bpr => "bpr",
            Self::Train => "train",
        })
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = InputError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bp" => Ok(Self::Bp),
            "bpr" => Ok(Self::Bpr),
            "train" => Ok(Self::Train),
            _ => Err(InputError::Range(format!("unknown problem kind '{s}'"))),
        }
    }
}

/// Items sorted by non-increasing size, with rejection costs or positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPacking")]
pub struct PackingInstance {
    sizes: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejection_costs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawPacking {
    sizes: Vec<f64>,
    #[serde(default)]
    rejection_costs: Option<Vec<f64>>,
    #[serde(default)]
    positions: Option<Vec<f64>>,
}

impl TryFrom<RawPacking> for PackingInstance {
    type Error = InputError;

    fn try_from(r: RawPacking) -> Result<Self, Self::Error> {
        Self::new(r.sizes, r.rejection_costs, r.positions)
    }
}

fn check_unit_range(name: &str, v: &[f64]) -> Result<(), InputError> {
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(InputError::NonFinite(format!("{name}[{i}]")));
        }
        if !(x > 0.0 && x <= 1.0) {
            return Err(InputError::Range(format!(
                "{name}[{i}] = {x} outside (0, 1]"
            )));
        }
    }
    Ok(())
}

impl PackingInstance {
    pub fn new(
        sizes: Vec<f64>,
        rejection_costs: Option<Vec<f64>>,
        positions: Option<Vec<f64>>,
    ) -> Result<Self, InputError> {
        if sizes.is_empty() {
            return Err(InputError::Range("instance has no items".into()));
        }
        check_unit_range("sizes", &sizes)?;
        if let Some(w) = sizes.windows(2).position(|w| w[0] < w[1]) {
            return Err(InputError::Range(format!(
                "sizes not sorted non-increasing at index {}",
                w + 1
            )));
        }
        if rejection_costs.is_some() && positions.is_some() {
            return Err(InputError::Range(
                "rejection costs and positions are exclusive".into(),
            ));
        }
        for (name, v) in [
            ("rejection_costs", &rejection_costs),
            ("positions", &positions),
        ] {
            if let Some(v) = v {
                if v.len() != sizes.len() {
                    return Err(InputError::Dimension(format!(
                        "{} {name} for {} items",
                        v.len(),
                        sizes.len()
                    )));
                }
                check_unit_range(name, v)?;
            }
        }
        Ok(Self {
            sizes,
            rejection_costs,
            positions,
        })
    }

    pub fn bin_packing(sizes: Vec<f64>) -> Result<Self, InputError> {
        Self::new(sizes, None, None)
    }

    pub fn bpr(sizes: Vec<f64>, rejection_costs: Vec<f64>) -> Result<Self, InputError> {
        Self::new(sizes, Some(rejection_costs), None)
    }

    pub fn train(sizes: Vec<f64>, positions: Vec<f64>) -> Result<Self, InputError> {
        Self::new(sizes, None, Some(positions))
    }

    pub fn kind(&self) -> ProblemKind {
        match (&self.rejection_costs, &self.positions) {
            (Some(_), _) => ProblemKind::Bpr,
            (_, Some(_)) => ProblemKind::Train,
            _ => ProblemKind::Bp,
        }
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn rejection_costs(&self) -> Option<&[f64]> {
        self.rejection_costs.as_deref()
    }

    pub fn positions(&self) -> Option<&[f64]> {
        self.positions.as_deref()
    }

    /// Cost of one bin or tour holding `items`.
    pub fn bin_cost(&self, items: &[usize]) -> f64 {
        match &self.positions {
            Some(p) => items.iter().map(|&i| p[i]).fold(0.0, f64::max),
            None => 1.0,
        }
    }

    /// The pattern family of the configuration LP.
    pub fn family(&self) -> Box<dyn PatternFamily> {
        match self.kind() {
            ProblemKind::Bp => Box::new(BinPackingFamily {
                sizes: self.sizes.clone(),
            }),
            ProblemKind::Bpr => Box::new(BprFamily {
                sizes: self.sizes.clone(),
                rejection_costs: self.rejection_costs.clone().unwrap_or_default(),
            }),
            ProblemKind::Train => Box::new(TrainFamily {
                sizes: self.sizes.clone(),
                positions: self.positions.clone().unwrap_or_default(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtraOrigin {
    /// Deficit repair with group representatives.
    Repair,
    /// Bought for small-item space.
    SmallSpace,
    /// Holds small items split off by the fractional assignment.
    Discard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraBin {
    pub items: Vec<usize>,
    pub origin: ExtraOrigin,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PackingStats {
    pub lp_objective: f64,
    pub opt_f: f64,
    pub eps: f64,
    pub pre_rejected: usize,
    pub large: usize,
    pub small: usize,
    pub lp_support: usize,
    pub fractional_columns: usize,
    pub rounding_attempts: u32,
    pub repair_rounds: usize,
    pub repair_budget_rounds: usize,
    pub small_space_bins: usize,
    pub discarded: usize,
    /// `|B_j x - B_j y|` per position class.
    pub b_gap: Vec<f64>,
    pub classes: usize,
}

/// Bins from the rounded patterns, rejected items and annotated extra bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingSolution {
    pub bins: Vec<Vec<usize>>,
    #[serde(default)]
    pub rejected: Vec<usize>,
    #[serde(default)]
    pub extra_bins: Vec<ExtraBin>,
    pub total_cost: f64,
    #[serde(default)]
    pub stats: PackingStats,
}

impl PackingSolution {
    /// All bins, extra bins included.
    pub fn all_bins(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.bins
            .iter()
            .map(Vec::as_slice)
            .chain(self.extra_bins.iter().map(|b| b.items.as_slice()))
    }
}

/// Large items, size groups and position classes for one value of `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemGroups {
    pub eps: f64,
    /// Large items (`s_i >= eps`) per class, in index order.
    pub large: Vec<Vec<usize>>,
    /// Small items per class, in index order.
    pub small: Vec<Vec<usize>>,
    /// `(class, level, items)` with `2^-level >= s_i > 2^-(level+1)`.
    pub size_groups: Vec<SizeGroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeGroup {
    pub class: usize,
    pub level: u32,
    pub items: Vec<usize>,
}

/// `l` with `2^-l >= s > 2^-(l+1)`.
pub fn size_level(s: f64) -> u32 {
    let mut l = 0;
    while s <= 0.5f64.powi(l as i32 + 1) {
        l += 1;
    }
    l
}

impl ItemGroups {
    /// `items` in index order, `class[i]` the position class of item `i`.
    pub fn build(
        sizes: &[f64],
        items: &[usize],
        class: &[usize],
        n_classes: usize,
        eps: f64,
    ) -> Self {
        let mut large = vec![Vec::new(); n_classes];
        let mut small = vec![Vec::new(); n_classes];
        for &i in items {
            if sizes[i] >= eps {
                large[class[i]].push(i);
            } else {
                small[class[i]].push(i);
            }
        }
        let mut size_groups: Vec<SizeGroup> = Vec::new();
        for (c, items) in large.iter().enumerate() {
            for &i in items {
                let level = size_level(sizes[i]);
                match size_groups
                    .iter_mut()
                    .find(|g| g.class == c && g.level == level)
                {
                    Some(g) => g.items.push(i),
                    None => size_groups.push(SizeGroup {
                        class: c,
                        level,
                        items: vec![i],
                    }),
                }
            }
        }
        Self {
            eps,
            large,
            small,
            size_groups,
        }
    }

    /// Number of large items over all classes.
    pub fn n_large(&self) -> usize {
        self.large.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels() {
        assert_eq!(size_level(1.0), 0);
        assert_eq!(size_level(0.7), 0);
        assert_eq!(size_level(0.5), 1);
        assert_eq!(size_level(0.3), 1);
        assert_eq!(size_level(0.25), 2);
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(PackingInstance::bin_packing(vec![0.3, 0.5]).is_err());
        assert!(PackingInstance::bpr(vec![0.5], vec![1.5]).is_err());
        assert!(PackingInstance::bin_packing(vec![]).is_err());
        assert!(PackingInstance::train(vec![0.5], vec![0.0]).is_err());
        assert_eq!(
            PackingInstance::train(vec![0.5], vec![0.3]).unwrap().kind(),
            ProblemKind::Train
        );
    }

    #[test]
    fn groups_split_by_class() {
        let sizes = [0.9, 0.6, 0.4, 0.3, 0.05];
        let g = ItemGroups::build(&sizes, &[0, 1, 2, 3, 4], &[0, 1, 0, 0, 1], 2, 0.1);
        assert_eq!(g.large, vec![vec![0, 2, 3], vec![1]]);
        assert_eq!(g.small, vec![vec![], vec![4]]);
        assert_eq!(g.size_groups.len(), 3);
        assert_eq!(g.n_large(), 4);
    }
}
