use serde::{Deserialize, Serialize};

use super::small::first_fit;
use super::ItemGroups;
use crate::covering::{Pattern, PatternKind};
use crate::error::PackingError;

/// `max(0, k - slots for domain[..k])` for every prefix length `k = 1..`.
pub fn check_deficits(selected: &[Pattern], domain: &[usize]) -> Vec<usize> {
    let mut slots = 0usize;
    domain
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            slots += selected.iter().filter(|p| p.contains(i)).count();
            (k + 1).saturating_sub(slots)
        })
        .collect()
}

/// `placement[k] = (pattern, slot item)` for `domain[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotAssignment {
    pub placement: Vec<(usize, usize)>,
}

/// Greedy in domain order. An item takes its own rejection slot if one is
/// selected, otherwise the smallest free bin slot of an item no later than
/// itself in the domain.
pub fn assign_items_to_slots(
    selected: &[Pattern],
    domain: &[usize],
) -> Result<SlotAssignment, PackingError> {
    let pos_of = |i: usize| domain.iter().position(|&d| d == i);
    // (domain position, pattern, item, used)
    let mut slots: Vec<(usize, usize, usize, bool)> = Vec::new();
    for (p, pat) in selected.iter().enumerate() {
        for &i in &pat.items {
            if let Some(k) = pos_of(i) {
                slots.push((k, p, i, false));
            }
        }
    }
    let mut placement = Vec::with_capacity(domain.len());
    for (k, &item) in domain.iter().enumerate() {
        let own_reject = slots
            .iter()
            .position(|s| !s.3 && s.2 == item && selected[s.1].kind == PatternKind::Reject);
        let pick = own_reject.or_else(|| {
            slots
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.3 && s.0 <= k && selected[s.1].kind == PatternKind::Bin)
                .max_by(|(_, a), (_, b)| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
                .map(|(idx, _)| idx)
        });
        let Some(idx) = pick else {
            return Err(PackingError::Deficit { prefix: k + 1 });
        };
        slots[idx].3 = true;
        placement.push((slots[idx].1, slots[idx].2));
    }
    Ok(SlotAssignment { placement })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    /// Each bin holds group representatives (their slots).
    pub bins: Vec<Vec<usize>>,
    /// Rounds bought per class.
    pub rounds: Vec<usize>,
    /// `ceil(log_budget * log2(L + 2))`, for comparison.
    pub budget_rounds: usize,
}

/// Bins of group representatives clearing every large-item deficit.
///
/// One round holds one copy of the largest item of each size group of a
/// class, packed First-Fit. Per class the number of rounds is the least that
/// clears all deficits.
pub fn repair_large(
    selected: &[Pattern],
    groups: &ItemGroups,
    sizes: &[f64],
    log_budget: f64,
) -> RepairOutcome {
    let l = groups.n_large();
    let budget_rounds = (log_budget * ((l + 2) as f64).log2()).ceil().max(0.0) as usize;
    let mut bins = Vec::new();
    let mut rounds = Vec::with_capacity(groups.large.len());
    for (c, domain) in groups.large.iter().enumerate() {
        let deficits = check_deficits(selected, domain);
        let reps: Vec<usize> = groups
            .size_groups
            .iter()
            .filter(|g| g.class == c)
            .map(|g| g.items[0])
            .collect();
        let mut need = 0;
        for (k, &d) in deficits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let covering = reps
                .iter()
                .filter(|r| domain.iter().position(|x| x == *r).is_some_and(|p| p <= k))
                .count()
                .max(1);
            need = need.max(d.div_ceil(covering));
        }
        let mut loads = Vec::new();
        let at = first_fit(&reps, sizes, &mut loads);
        let mut packed = vec![Vec::new(); loads.len()];
        for (&r, &b) in reps.iter().zip(&at) {
            packed[b].push(r);
        }
        for _ in 0..need {
            bins.extend(packed.iter().cloned());
        }
        rounds.push(need);
    }
    RepairOutcome {
        bins,
        rounds,
        budget_rounds,
    }
}
