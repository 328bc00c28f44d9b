use std::cmp::Ordering;

use crate::covering::Pattern;

/// Slack on the unit capacity.
pub const CAPACITY_TOL: f64 = 1e-12;
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy)]
struct State {
    scaled: u64,
    weight: f64,
    real: f64,
    parent: u32,
    item: u32,
}

const ROOT: u32 = u32::MAX;

/// `(1 - eps)`-approximate max-profit subset with `sum s_i <= 1`.
///
/// Profits are scaled by `n / (eps y_max)` and a Pareto frontier of
/// (scaled profit, weight) states is kept, which matches the dense
/// min-weight table on the best reachable scaled profit. Among surviving
/// states the real profit decides; near-ties go to the lexicographically
/// smallest item set.
pub fn knapsack_select(
    y: &[f64],
    sizes: &[f64],
    eps: f64,
    allowed: Option<&[bool]>,
) -> (Vec<usize>, f64) {
    assert_eq!(y.len(), sizes.len());
    assert!(eps > 0.0 && eps < 1.0, "eps = {eps} outside (0, 1)");
    let cand: Vec<usize> = (0..y.len())
        .filter(|&i| y[i] > 0.0 && sizes[i] <= 1.0 + CAPACITY_TOL && allowed.is_none_or(|a| a[i]))
        .collect();
    if cand.is_empty() {
        return (Vec::new(), 0.0);
    }
    let y_max = cand.iter().map(|&i| y[i]).fold(0.0, f64::max);
    let unit = eps * y_max / cand.len() as f64;

    let mut arena: Vec<State> = vec![State {
        scaled: 0,
        weight: 0.0,
        real: 0.0,
        parent: ROOT,
        item: ROOT,
    }];
    let mut frontier: Vec<u32> = vec![0];
    for &i in &cand {
        let p = (y[i] / unit).floor() as u64;
        let mut next = frontier.clone();
        for &s in &frontier {
            let st = arena[s as usize];
            let w = st.weight + sizes[i];
            if w <= 1.0 + CAPACITY_TOL {
                arena.push(State {
                    scaled: st.scaled + p,
                    weight: w,
                    real: st.real + y[i],
                    parent: s,
                    item: i as u32,
                });
                next.push((arena.len() - 1) as u32);
            }
        }
        // keep states not dominated in (scaled up, weight down)
        next.sort_by(|&a, &b| {
            let (a, b) = (&arena[a as usize], &arena[b as usize]);
            b.scaled
                .cmp(&a.scaled)
                .then(a.weight.partial_cmp(&b.weight).unwrap_or(Ordering::Equal))
                .then(b.real.partial_cmp(&a.real).unwrap_or(Ordering::Equal))
        });
        let mut kept = Vec::with_capacity(next.len());
        let mut lightest = f64::INFINITY;
        for s in next {
            if arena[s as usize].weight < lightest {
                lightest = arena[s as usize].weight;
                kept.push(s);
            }
        }
        kept.reverse();
        frontier = kept;
    }

    let items_of = |mut s: u32| -> Vec<usize> {
        let mut out = Vec::new();
        while arena[s as usize].parent != ROOT {
            out.push(arena[s as usize].item as usize);
            s = arena[s as usize].parent;
        }
        out.sort_unstable();
        out
    };
    let best_real = frontier
        .iter()
        .map(|&s| arena[s as usize].real)
        .fold(0.0, f64::max);
    let mut best: Option<Vec<usize>> = None;
    for &s in &frontier {
        if arena[s as usize].real >= best_real * (1.0 - TIE_TOL) {
            let set = items_of(s);
            if best.as_ref().is_none_or(|b| set < *b) {
                best = Some(set);
            }
        }
    }
    let set = best.unwrap_or_default();
    let value = set.iter().map(|&i| y[i]).sum();
    (set, value)
}

/// Knapsack pattern of cost one.
pub fn knapsack_fptas(y: &[f64], sizes: &[f64], eps: f64) -> Pattern {
    Pattern::bin(knapsack_select(y, sizes, eps, None).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_fits() {
        let p = knapsack_fptas(&[1.0, 2.0, 3.0], &[0.1, 0.2, 0.3], 0.1);
        assert_eq!(p.items, vec![0, 1, 2]);
    }

    #[test]
    fn picks_two_halves() {
        let (set, v) = knapsack_select(&[1.0, 1.0, 1.0], &[0.5, 0.5, 0.6], 0.1, None);
        assert_eq!(set, vec![0, 1]);
        assert_eq!(v, 2.0);
    }

    #[test]
    fn zero_prices() {
        let (set, v) = knapsack_select(&[0.0, 0.0], &[0.5, 0.5], 0.1, None);
        assert!(set.is_empty());
        assert_eq!(v, 0.0);
    }

    #[test]
    fn respects_filter() {
        let (set, _) = knapsack_select(&[1.0, 5.0], &[0.5, 0.5], 0.1, Some(&[true, false]));
        assert_eq!(set, vec![0]);
    }
}
