use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entropy::entropy_from_counts;
use crate::error::{ColoringError, InputError};
use crate::matrix::{DenseMatrix, DiscrepancyBounds};

/// Largest column count for which all `2^m` colorings are enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;
/// Largest column count for the direct search over `{-1,0,1}^m`.
pub const DEFAULT_DIRECT_CAP: usize = 16;
/// Buckets up to this size are scanned pairwise in `farthest_pair`.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 4096;
const SAMPLED_PAIRS: usize = 100_000;
/// Absolute slack on `|A_i chi| <= Delta_i`, scaled by `max(1, Delta_i)`.
pub const BOUND_TOL: f64 = 1e-9;

/// A vector in `{-1, 0, +1}^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct PartialColoring {
    values: Vec<i8>,
}

impl PartialColoring {
    pub fn new(values: Vec<i8>) -> Result<Self, InputError> {
        if let Some(bad) = values.iter().find(|v| !matches!(v, -1..=1)) {
            return Err(InputError::Range(format!(
                "coloring entry {bad} not in {{-1,0,1}}"
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(m: usize) -> Self {
        Self { values: vec![0; m] }
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_half(&self) -> bool {
        self.support() >= self.len().div_ceil(2)
    }

    pub fn is_full(&self) -> bool {
        self.support() == self.len()
    }

    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Full coloring from a bitmask: bit `j` set means `chi_j = -1`.
    pub fn from_mask(mask: u64, m: usize) -> Self {
        Self {
            values: (0..m)
                .map(|j| if mask >> j & 1 == 1 { -1 } else { 1 })
                .collect(),
        }
    }

    /// `(a - b) / 2` for two full colorings.
    pub fn half_difference(a: &Self, b: &Self) -> Result<Self, InputError> {
        if a.len() != b.len() {
            return Err(InputError::Dimension(
                "colorings of different length".into(),
            ));
        }
        Ok(Self {
            values: a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| (x - y) / 2)
                .collect(),
        })
    }
}

impl TryFrom<Vec<i8>> for PartialColoring {
    type Error = InputError;

    fn try_from(v: Vec<i8>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<PartialColoring> for Vec<i8> {
    fn from(c: PartialColoring) -> Self {
        c.values
    }
}

/// Row-wise rounded keys `round(A_i chi / (2 Delta_i))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignatureVector(pub Vec<i64>);

/// Nearest integer with half-integers going to the smaller neighbour.
pub fn round_half_down(z: f64) -> i64 {
    (z - 0.5).ceil() as i64
}

/// `|value| <= bound` up to [`BOUND_TOL`].
pub fn within_bound(value: f64, bound: f64) -> bool {
    value.abs() <= bound + BOUND_TOL * bound.max(1.0)
}

fn check_dims(a: &DenseMatrix, delta: &DiscrepancyBounds) -> Result<(), InputError> {
    if delta.len() != a.n_rows() {
        return Err(InputError::Dimension(format!(
            "{} discrepancy bounds for {} rows",
            delta.len(),
            a.n_rows()
        )));
    }
    Ok(())
}

pub fn rounded_signature(
    a: &DenseMatrix,
    delta: &DiscrepancyBounds,
    chi: &PartialColoring,
) -> Result<SignatureVector, InputError> {
    check_dims(a, delta)?;
    if chi.len() != a.n_cols() {
        return Err(InputError::Dimension(format!(
            "coloring of length {} for {} columns",
            chi.len(),
            a.n_cols()
        )));
    }
    Ok(SignatureVector(
        (0..a.n_rows())
            .map(|i| round_half_down(a.row_dot_signs(i, chi.values()) / (2.0 * delta[i])))
            .collect(),
    ))
}

/// `A_i chi` for the full coloring encoded by `mask`, summed in column order so
/// the value is bit-identical to [`DenseMatrix::row_dot_signs`].
#[inline]
fn masked_row_sum(row: &[f64], mask: u64) -> f64 {
    let mut s = 0.0;
    for (j, a) in row.iter().enumerate() {
        if mask >> j & 1 == 1 {
            s += -*a;
        } else {
            s += *a;
        }
    }
    s
}

#[inline]
fn fill_signature(a: &DenseMatrix, delta: &DiscrepancyBounds, mask: u64, out: &mut [i64]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = round_half_down(masked_row_sum(a.row(i), mask) / (2.0 * delta[i]));
    }
}

fn enumeration_guard(m: usize, cap: usize) -> Result<(), InputError> {
    if m > cap {
        return Err(InputError::Budget(format!(
            "{m} columns exceed the enumeration cap of {cap}"
        )));
    }
    Ok(())
}

/// Exact entropy (bits) of the joint rounded signature under a uniformly random
/// full coloring. Upper-bounds the Delta-approximate entropy of `A`.
pub fn exact_joint_entropy(a: &DenseMatrix, delta: &DiscrepancyBounds) -> Result<f64, InputError> {
    exact_joint_entropy_capped(a, delta, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_joint_entropy_capped(
    a: &DenseMatrix,
    delta: &DiscrepancyBounds,
    cap: usize,
) -> Result<f64, InputError> {
    check_dims(a, delta)?;
    let m = a.n_cols();
    enumeration_guard(m, cap.min(31))?;
    if a.n_rows() == 0 {
        return Ok(0.0);
    }
    let total: u64 = 1 << m;
    const CHUNK: u64 = 1 << 12;
    let n_chunks = total.div_ceil(CHUNK);
    let counts = (0..n_chunks)
        .into_par_iter()
        .fold(HashMap::<Box<[i64]>, u64>::new, |mut map, c| {
            let mut key = vec![0i64; a.n_rows()];
            for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                fill_signature(a, delta, mask, &mut key);
                if let Some(v) = map.get_mut(&key[..]) {
                    *v += 1;
                } else {
                    map.insert(key.clone().into_boxed_slice(), 1);
                }
            }
            map
        })
        .reduce(HashMap::new, |mut left, right| {
            for (k, v) in right {
                *left.entry(k).or_insert(0) += v;
            }
            left
        });
    // sort counts so the floating sum does not depend on hash order
    let mut counts: Vec<u64> = counts.into_values().collect();
    counts.sort_unstable();
    Ok(entropy_from_counts(counts))
}

/// Smallest integer `t` with `t >= 2^(0.8 m)`, computed exactly as `t^5 >= 2^(4m)`.
pub fn bucket_threshold(m: usize) -> u64 {
    assert!(m <= 31, "bucket threshold only defined up to m = 31");
    let target: u128 = 1u128 << (4 * m);
    let mut t = 2f64.powf(0.8 * m as f64).ceil() as u128;
    while t > 1 && (t - 1).pow(5) >= target {
        t -= 1;
    }
    while t.pow(5) < target {
        t += 1;
    }
    t as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfColoringMode {
    /// Bucket all colorings by signature and difference a far pair in a large bucket.
    Pigeonhole,
    /// Search `{-1,0,1}^m` directly, largest supports first.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfColoringOptions {
    pub enumeration_cap: usize,
    pub direct_cap: usize,
}

impl Default for HalfColoringOptions {
    fn default() -> Self {
        Self {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            direct_cap: DEFAULT_DIRECT_CAP,
        }
    }
}

/// True iff `chi` is a half-coloring with `|A_i chi| <= Delta_i` on every row.
pub fn is_valid_half_coloring(
    a: &DenseMatrix,
    delta: &DiscrepancyBounds,
    chi: &PartialColoring,
) -> bool {
    chi.len() == a.n_cols()
        && delta.len() == a.n_rows()
        && chi.is_half()
        && (0..a.n_rows()).all(|i| within_bound(a.row_dot_signs(i, chi.values()), delta[i]))
}

pub fn find_half_coloring(
    a: &DenseMatrix,
    delta: &DiscrepancyBounds,
    mode: HalfColoringMode,
) -> Result<PartialColoring, ColoringError> {
    find_half_coloring_with(a, delta, mode, HalfColoringOptions::default())
}

/// Finds a half-coloring with `|A_i chi| <= Delta_i` for all rows.
///
/// `m = 1` is accepted: the single column then needs a full sign.
pub fn find_half_coloring_with(
    a: &DenseMatrix,
    delta: &DiscrepancyBounds,
    mode: HalfColoringMode,
    opts: HalfColoringOptions,
) -> Result<PartialColoring, ColoringError> {
    check_dims(a, delta)?;
    let m = a.n_cols();
    if m == 0 {
        return Err(InputError::Dimension("no columns to color".into()).into());
    }
    let chi = match mode {
        HalfColoringMode::Pigeonhole => pigeonhole(a, delta, opts.enumeration_cap)?,
        HalfColoringMode::Direct => direct(a, delta, opts.direct_cap)?,
    };
    debug_assert!(is_valid_half_coloring(a, delta, &chi));
    Ok(chi)
}

fn pigeonhole(
    a: &DenseMatrix,
    delta: &DiscrepancyBounds,
    cap: usize,
) -> Result<PartialColoring, ColoringError> {
    let m = a.n_cols();
    enumeration_guard(m, cap.min(31))?;
    let total: u64 = 1 << m;
    let threshold = bucket_threshold(m);

    let mut ids: HashMap<Box<[i64]>, u32> = HashMap::new();
    let mut bucket_of = Vec::with_capacity(total as usize);
    let mut sizes: Vec<u64> = Vec::new();
    let mut key = vec![0i64; a.n_rows()];
    for mask in 0..total {
        fill_signature(a, delta, mask, &mut key);
        let id = match ids.get(&key[..]) {
            Some(&id) => id,
            None => {
                let id = sizes.len() as u32;
                ids.insert(key.clone().into_boxed_slice(), id);
                sizes.push(0);
                id
            }
        };
        sizes[id as usize] += 1;
        bucket_of.push(id);
    }

    // large buckets, biggest first, ties by first appearance
    let mut large: Vec<u32> = (0..sizes.len() as u32)
        .filter(|&id| sizes[id as usize] >= threshold)
        .collect();
    if large.is_empty() {
        return Err(ColoringError::NoLargeBucket {
            largest: sizes.iter().copied().max().unwrap_or(0),
            threshold,
        });
    }
    large.sort_by_key(|&id| std::cmp::Reverse(sizes[id as usize]));

    for id in large {
        let members: Vec<u64> = (0..total)
            .filter(|&mask| bucket_of[mask as usize] == id)
            .collect();
        let pair = farthest_pair_masks(&members, m);
        if pair.threshold_met {
            let chi = PartialColoring::half_difference(
                &PartialColoring::from_mask(pair.first, m),
                &PartialColoring::from_mask(pair.second, m),
            )?;
            if (0..a.n_rows()).all(|i| within_bound(a.row_dot_signs(i, chi.values()), delta[i])) {
                return Ok(chi);
            }
        }
    }
    Err(ColoringError::NoValidColoring {
        min_support: m.div_ceil(2),
    })
}

fn direct(
    a: &DenseMatrix,
    delta: &DiscrepancyBounds,
    cap: usize,
) -> Result<PartialColoring, ColoringError> {
    let m = a.n_cols();
    enumeration_guard(m, cap.min(31))?;
    let min_support = m.div_ceil(2);
    let n = a.n_rows();
    let mut chi = vec![0i8; m];
    let mut support: Vec<usize> = Vec::with_capacity(m);
    for k in (min_support..=m).rev() {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            support.clear();
            support.extend_from_slice(&combo);
            // first support element fixed to +1; negation gives the rest
            for signs in 0u64..(1u64 << (k - 1)) {
                chi.iter_mut().for_each(|c| *c = 0);
                chi[support[0]] = 1;
                for (t, &j) in support.iter().enumerate().skip(1) {
                    chi[j] = if signs >> (t - 1) & 1 == 1 { -1 } else { 1 };
                }
                if (0..n).all(|i| within_bound(a.row_dot_signs(i, &chi), delta[i])) {
                    return Ok(PartialColoring { values: chi });
                }
            }
            if !next_combination(&mut combo, m) {
                break;
            }
        }
    }
    Err(ColoringError::NoValidColoring { min_support })
}

/// Advances `combo` to the next k-subset of `0..m` in lexicographic order.
fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - k + i {
            combo[i] += 1;
            for t in i + 1..k {
                combo[t] = combo[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Result of [`farthest_pair`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarthestPair<T> {
    pub first: T,
    pub second: T,
    pub distance: usize,
    /// `distance >= m/2`.
    pub threshold_met: bool,
}

/// Finds a pair of sign vectors at large Hamming distance.
///
/// Buckets of at most 4096 vectors are scanned exhaustively; larger ones are
/// sampled (deterministically) and then improved by farthest-point sweeps.
pub fn farthest_pair(bucket: &[Vec<i8>]) -> Result<FarthestPair<Vec<i8>>, InputError> {
    if bucket.len() < 2 {
        return Err(InputError::Range(format!(
            "farthest_pair needs at least 2 vectors, got {}",
            bucket.len()
        )));
    }
    let m = bucket[0].len();
    if m == 0 || m > 64 {
        return Err(InputError::Dimension(format!(
            "vector length {m} outside 1..=64"
        )));
    }
    let mut masks = Vec::with_capacity(bucket.len());
    for v in bucket {
        if v.len() != m {
            return Err(InputError::Dimension("vectors of different length".into()));
        }
        let mut mask = 0u64;
        for (j, &s) in v.iter().enumerate() {
            match s {
                1 => {}
                -1 => mask |= 1 << j,
                other => return Err(InputError::Range(format!("sign entry {other}"))),
            }
        }
        masks.push(mask);
    }
    let p = farthest_pair_masks(&masks, m);
    let unmask = |mask: u64| -> Vec<i8> { PartialColoring::from_mask(mask, m).values };
    Ok(FarthestPair {
        first: unmask(p.first),
        second: unmask(p.second),
        distance: p.distance,
        threshold_met: p.threshold_met,
    })
}

pub(crate) fn farthest_pair_masks(masks: &[u64], m: usize) -> FarthestPair<u64> {
    debug_assert!(masks.len() >= 2);
    let dist = |x: u64, y: u64| (x ^ y).count_ones() as usize;
    let (mut a, mut b) = (masks[0], masks[1]);
    let mut best = dist(a, b);
    if masks.len() <= EXHAUSTIVE_PAIR_LIMIT {
        'outer: for (i, &x) in masks.iter().enumerate() {
            for &y in &masks[i + 1..] {
                let d = dist(x, y);
                if d > best {
                    (a, b, best) = (x, y, d);
                    if best == m {
                        break 'outer;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(masks.len() as u64 ^ (m as u64) << 32);
        for _ in 0..SAMPLED_PAIRS {
            let x = masks[rng.random_range(0..masks.len())];
            let y = masks[rng.random_range(0..masks.len())];
            let d = dist(x, y);
            if d > best {
                (a, b, best) = (x, y, d);
            }
        }
        // farthest-point sweeps from each end until no gain
        for _ in 0..16 {
            if best == m {
                break;
            }
            let far_from = |p: u64| masks.iter().copied().max_by_key(|&q| dist(p, q)).unwrap();
            let c = far_from(a);
            let d = dist(a, c);
            let improved_a = d > best;
            if improved_a {
                (b, best) = (c, d);
            }
            let c = far_from(b);
            let d = dist(b, c);
            let improved_b = d > best;
            if improved_b {
                (a, best) = (c, d);
            }
            if !improved_a && !improved_b {
                break;
            }
        }
    }
    FarthestPair {
        first: a,
        second: b,
        distance: best,
        threshold_met: 2 * best >= m,
    }
}
