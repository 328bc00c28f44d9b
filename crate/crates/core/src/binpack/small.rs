use serde::{Deserialize, Serialize};

use crate::error::PackingError;
use crate::oracles::CAPACITY_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallAssignment {
    /// Items placed whole, per space.
    pub placed: Vec<Vec<usize>>,
    /// Items cut by a space boundary.
    pub discarded: Vec<usize>,
}

/// Fills `spaces` with `items` in the given order, splitting at boundaries.
/// A split item is discarded; it is charged to the space where it started,
/// so every space loses at most one item.
pub fn assign_small_fractional(
    spaces: &[f64],
    items: &[usize],
    sizes: &[f64],
) -> Result<SmallAssignment, PackingError> {
    let available: f64 = spaces.iter().map(|s| s.max(0.0)).sum();
    let required: f64 = items.iter().map(|&i| sizes[i]).sum();
    if available + CAPACITY_TOL < required {
        return Err(PackingError::InsufficientSpace {
            available,
            required,
        });
    }
    let mut placed = vec![Vec::new(); spaces.len()];
    let mut discarded = Vec::new();
    let mut k = 0;
    let mut left = spaces.first().copied().unwrap_or(0.0).max(0.0);
    for &i in items {
        while left <= CAPACITY_TOL && k + 1 < spaces.len() {
            k += 1;
            left = spaces[k].max(0.0);
        }
        let s = sizes[i];
        if s <= left + CAPACITY_TOL {
            placed[k].push(i);
            left = (left - s).max(0.0);
            continue;
        }
        discarded.push(i);
        let mut rest = s - left;
        while rest > CAPACITY_TOL && k + 1 < spaces.len() {
            k += 1;
            let cap = spaces[k].max(0.0);
            if rest <= cap {
                left = cap - rest;
                rest = 0.0;
            } else {
                rest -= cap;
            }
        }
        if rest > CAPACITY_TOL {
            left = 0.0;
        }
    }
    Ok(SmallAssignment { placed, discarded })
}

/// First-Fit of `items` in the given order into bins with current `loads`;
/// new bins are appended. Returns the bin index of each item.
pub fn first_fit(items: &[usize], sizes: &[f64], loads: &mut Vec<f64>) -> Vec<usize> {
    items
        .iter()
        .map(|&i| {
            let s = sizes[i];
            match loads.iter().position(|&l| l + s <= 1.0 + CAPACITY_TOL) {
                Some(b) => {
                    loads[b] += s;
                    b
                }
                None => {
                    loads.push(s);
                    loads.len() - 1
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nothing_to_place() {
        let a = assign_small_fractional(&[0.5], &[], &[]).unwrap();
        assert_eq!(a.placed, vec![Vec::<usize>::new()]);
        assert!(a.discarded.is_empty());
    }

    #[test]
    fn fits_whole() {
        let a = assign_small_fractional(&[1.0], &[0, 1], &[0.4, 0.4]).unwrap();
        assert_eq!(a.placed, vec![vec![0, 1]]);
        assert!(a.discarded.is_empty());
    }

    #[test]
    fn one_split() {
        let a = assign_small_fractional(&[0.5, 0.5], &[0, 1, 2], &[0.4, 0.4, 0.2]).unwrap();
        assert_eq!(a.placed, vec![vec![0], vec![2]]);
        assert_eq!(a.discarded, vec![1]);
    }

    #[test]
    fn insufficient() {
        let e = assign_small_fractional(&[0.3], &[0], &[0.4]).unwrap_err();
        assert!(matches!(e, PackingError::InsufficientSpace { .. }));
    }

    #[test]
    fn first_fit_reuses_space() {
        let mut loads = vec![0.7];
        let at = first_fit(&[0, 1, 2], &[0.3, 0.5, 0.5], &mut loads);
        assert_eq!(at, vec![0, 1, 1]);
        assert_eq!(loads.len(), 2);
    }
}
