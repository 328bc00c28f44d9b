use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::InputError;

pub const DEFAULT_BIT_DEPTH: u32 = 20;

/// Vector in `[0,1]` with every entry a multiple of `2^-K`, stored as numerators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicVector {
    bit_depth: u32,
    numerators: Vec<u64>,
}

impl DyadicVector {
    pub fn new(bit_depth: u32, numerators: Vec<u64>) -> Result<Self, InputError> {
        if bit_depth == 0 || bit_depth > 52 {
            return Err(InputError::Range(format!(
                "bit depth {bit_depth} outside 1..=52"
            )));
        }
        let one = 1u64 << bit_depth;
        if numerators.iter().any(|&q| q > one) {
            return Err(InputError::Range("dyadic entry above one".into()));
        }
        Ok(Self {
            bit_depth,
            numerators,
        })
    }

    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// Columns whose `2^-k` bit is set, `1 <= k <= K`.
    pub fn plane(&self, k: u32) -> Vec<usize> {
        assert!((1..=self.bit_depth).contains(&k));
        let shift = self.bit_depth - k;
        (0..self.numerators.len())
            .filter(|&j| self.numerators[j] >> shift & 1 == 1)
            .collect()
    }

    /// Planes `1..=K`; entry `k-1` holds plane `k`.
    pub fn planes(&self) -> Vec<Vec<usize>> {
        (1..=self.bit_depth).map(|k| self.plane(k)).collect()
    }

    /// Adds `sign * 2^-k` to column `j`.
    pub fn step(&mut self, j: usize, k: u32, sign: i8) {
        let inc = 1u64 << (self.bit_depth - k);
        match sign {
            1 => self.numerators[j] += inc,
            -1 => self.numerators[j] -= inc,
            _ => {}
        }
        debug_assert!(self.numerators[j] <= 1u64 << self.bit_depth);
    }

    pub fn values(&self) -> Vec<f64> {
        let scale = (-(self.bit_depth as f64)).exp2();
        self.numerators.iter().map(|&q| q as f64 * scale).collect()
    }

    /// Value rebuilt bit by bit from the planes; equals `values()` exactly.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .numerators
            .iter()
            .map(|&q| if q >> self.bit_depth == 1 { 1.0 } else { 0.0 })
            .collect();
        for (k, plane) in self.planes().iter().enumerate() {
            let w = (-((k + 1) as f64)).exp2();
            for &j in plane {
                out[j] += w;
            }
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        let mask = (1u64 << self.bit_depth) - 1;
        self.numerators.iter().all(|q| q & mask == 0)
    }
}

/// Rounds each `x_j` to a neighbouring multiple of `2^-K`, upwards with
/// probability equal to the residue, so `E[snap(x)] = x`.
pub fn dyadic_snap<R: Rng + ?Sized>(
    x: &[f64],
    bit_depth: u32,
    rng: &mut R,
) -> Result<DyadicVector, InputError> {
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(InputError::Range(format!("x entry {v} outside [0, 1]")));
    }
    let scale = (bit_depth as f64).exp2();
    let numerators = x
        .iter()
        .map(|&v| {
            // exact: scaling by a power of two
            let scaled = v * scale;
            let low = scaled.floor();
            let frac = scaled - low;
            let up = frac > 0.0 && rng.random::<f64>() < frac;
            low as u64 + up as u64
        })
        .collect();
    DyadicVector::new(bit_depth, numerators)
}
