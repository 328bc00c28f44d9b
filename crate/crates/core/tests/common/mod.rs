//! Test oracles: exhaustive integer optima and exact LP values on tiny instances.
#![allow(dead_code, clippy::needless_range_loop)]

use entround::binpack::PackingInstance;

const FIT_TOL: f64 = 1e-12;

fn fits(inst: &PackingInstance, mask: usize) -> bool {
    let load: f64 = (0..inst.n())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| inst.sizes()[i])
        .sum();
    load <= 1.0 + FIT_TOL
}

fn mask_cost(inst: &PackingInstance, mask: usize) -> f64 {
    match inst.positions() {
        Some(p) => (0..inst.n())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| p[i])
            .fold(0.0, f64::max),
        None => 1.0,
    }
}

/// Cheapest way to cover exactly `mask` with one bin, or one rejection.
fn block_cost(inst: &PackingInstance, mask: usize) -> f64 {
    let mut best = if fits(inst, mask) {
        mask_cost(inst, mask)
    } else {
        f64::INFINITY
    };
    if mask.count_ones() == 1 {
        if let Some(pi) = inst.rejection_costs() {
            best = best.min(pi[mask.trailing_zeros() as usize]);
        }
    }
    best
}

/// Integer optimum by a subset DP over partitions; `n <= 12`.
pub fn brute_force_int(inst: &PackingInstance) -> f64 {
    let n = inst.n();
    assert!(n <= 12, "integer oracle limited to 12 items");
    let full = (1usize << n) - 1;
    let block: Vec<f64> = (0..=full)
        .map(|m| if m == 0 { 0.0 } else { block_cost(inst, m) })
        .collect();
    let mut g = vec![f64::INFINITY; full + 1];
    g[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // submasks of rest, each joined with the lowest item
        let mut sub = rest;
        loop {
            let s = sub | low;
            let v = block[s] + g[mask ^ s];
            if v < g[mask] {
                g[mask] = v;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    g[full]
}

/// Every feasible pattern as (mask, cost), rejections included.
pub fn all_patterns(inst: &PackingInstance) -> Vec<(usize, f64)> {
    let n = inst.n();
    let mut out: Vec<(usize, f64)> = (1..1usize << n)
        .filter(|&m| fits(inst, m))
        .map(|m| (m, mask_cost(inst, m)))
        .collect();
    if let Some(pi) = inst.rejection_costs() {
        out.extend((0..n).map(|i| (1usize << i, pi[i])));
    }
    out
}

/// `max 1^T y  s.t.  sum_{i in S} y_i <= c_S` over the listed `(mask, cost)`
/// rows, by a dense tableau simplex with Dantzig pricing. Returns `(value, y)`.
fn packing_simplex(rows_in: &[(usize, f64)], n: usize) -> (f64, Vec<f64>) {
    let rows = rows_in.len();
    let cols = n + rows;
    let mut t = vec![vec![0.0f64; cols + 1]; rows + 1];
    for (r, &(mask, cost)) in rows_in.iter().enumerate() {
        for i in 0..n {
            if mask >> i & 1 == 1 {
                t[r][i] = 1.0;
            }
        }
        t[r][n + r] = 1.0;
        t[r][cols] = cost;
    }
    for i in 0..n {
        t[rows][i] = -1.0;
    }
    let mut basis: Vec<usize> = (n..cols).collect();
    for _ in 0..100_000 {
        let (mut enter, mut best) = (usize::MAX, -1e-12);
        for j in 0..cols {
            if t[rows][j] < best {
                best = t[rows][j];
                enter = j;
            }
        }
        if enter == usize::MAX {
            let mut y = vec![0.0; n];
            for (r, &b) in basis.iter().enumerate() {
                if b < n {
                    y[b] = t[r][cols];
                }
            }
            return (t[rows][cols], y);
        }
        let mut leave = usize::MAX;
        let mut ratio = f64::INFINITY;
        for r in 0..rows {
            if t[r][enter] > 1e-12 {
                let q = t[r][cols] / t[r][enter];
                if q < ratio - 1e-15
                    || (q <= ratio + 1e-15 && leave != usize::MAX && basis[r] < basis[leave])
                {
                    ratio = q;
                    leave = r;
                }
            }
        }
        assert!(leave != usize::MAX, "unbounded dual");
        let piv = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[leave].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != leave && row[enter] != 0.0 {
                let f = row[enter];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        basis[leave] = enter;
    }
    panic!("simplex did not terminate");
}

/// Exact covering LP optimum over all patterns: cutting planes on the dual,
/// separated by full enumeration; `n <= 12`.
pub fn exact_lp(inst: &PackingInstance) -> f64 {
    let n = inst.n();
    assert!(n <= 12, "fractional oracle limited to 12 items");
    let pats = all_patterns(inst);
    let mut rows: Vec<(usize, f64)> = pats
        .iter()
        .copied()
        .filter(|(m, _)| m.count_ones() == 1)
        .collect();
    loop {
        let (value, y) = packing_simplex(&rows, n);
        let worst = pats
            .iter()
            .map(|&(m, c)| {
                let load: f64 = (0..n).filter(|i| m >> i & 1 == 1).map(|i| y[i]).sum();
                (load - c, m, c)
            })
            .fold((0.0, 0, 0.0), |b, v| if v.0 > b.0 { v } else { b });
        if worst.0 <= 1e-10 {
            return value;
        }
        rows.push((worst.1, worst.2));
    }
}

/// Random pattern matrices: `(sizes, patterns)` with `m <= 16` columns.
pub fn pattern_corpus(
    seed: u64,
    count: usize,
) -> Vec<(Vec<f64>, Vec<entround::covering::Pattern>)> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=10);
            let s = gen::sizes(&mut rng, n);
            let m = rng.random_range(4..=16);
            let pats = (0..m)
                .map(|_| {
                    let mut order: Vec<usize> = (0..n).collect();
                    order.shuffle(&mut rng);
                    let mut load = 0.0;
                    let mut items = Vec::new();
                    for i in order {
                        if load + s[i] <= 1.0 && rng.random_bool(0.7) {
                            load += s[i];
                            items.push(i);
                        }
                    }
                    entround::covering::Pattern::bin(items)
                })
                .collect();
            (s, pats)
        })
        .collect()
}

/// Deterministic small random instances for the end-to-end checks.
pub mod gen {
    use entround::binpack::PackingInstance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn sizes(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let mut s: Vec<f64> = (0..n)
            .map(|_| match rng.random_range(0..3) {
                0 => rng.random_range(0.5..=1.0),
                1 => rng.random_range(0.2..0.5),
                _ => rng.random_range(0.02..0.2),
            })
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn bpr(seed: u64, n: usize) -> PackingInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sizes(&mut rng, n);
        let pi = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
        PackingInstance::bpr(s, pi).unwrap()
    }

    pub fn train(seed: u64, n: usize) -> PackingInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sizes(&mut rng, n);
        let p = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
        PackingInstance::train(s, p).unwrap()
    }

    pub fn bp(seed: u64, n: usize) -> PackingInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PackingInstance::bin_packing(sizes(&mut rng, n)).unwrap()
    }
}
