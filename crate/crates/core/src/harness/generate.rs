use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::binpack::{PackingInstance, ProblemKind};

/// Grid ratio of generated positions: `(1 + POSITION_EPS)^-k`.
pub const POSITION_EPS: f64 = 0.1;
const MAX_GRADE: i32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeDistribution {
    /// Uniform on `(0, 1]`.
    Uniform,
    /// `2^-k` with `k` uniform in `1..=5`.
    Dyadic,
    /// Three random centres with a little noise.
    Clustered,
}

impl std::str::FromStr for SizeDistribution {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "dyadic" => Ok(Self::Dyadic),
            "clustered" => Ok(Self::Clustered),
            _ => Err(HarnessError::Usage(format!(
                "unknown size distribution '{s}'"
            ))),
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Reproducible random instance, sorted by size.
pub fn generate_instance(
    kind: ProblemKind,
    n: usize,
    seed: u64,
    dist: SizeDistribution,
) -> Result<PackingInstance, HarnessError> {
    if n == 0 {
        return Err(HarnessError::Usage("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres: Vec<f64> = (0..3).map(|_| 0.05 + 0.9 * rng.random::<f64>()).collect();
    let mut sizes: Vec<f64> = (0..n)
        .map(|_| match dist {
            SizeDistribution::Uniform => unit(&mut rng),
            SizeDistribution::Dyadic => 0.5f64.powi(rng.random_range(1..=5)),
            SizeDistribution::Clustered => {
                let c = centres[rng.random_range(0..3)];
                (c + 0.05 * (rng.random::<f64>() - 0.5)).clamp(0.01, 1.0)
            }
        })
        .collect();
    sizes.sort_by(|a, b| b.total_cmp(a));
    let inst = match kind {
        ProblemKind::Bp => PackingInstance::bin_packing(sizes)?,
        ProblemKind::Bpr => {
            let pi = (0..n).map(|_| unit(&mut rng)).collect();
            PackingInstance::bpr(sizes, pi)?
        }
        ProblemKind::Train => {
            let pos = (0..n)
                .map(|_| (1.0 + POSITION_EPS).powi(-rng.random_range(0..=MAX_GRADE)))
                .collect();
            PackingInstance::train(sizes, pos)?
        }
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = generate_instance(ProblemKind::Bpr, 5, 7, SizeDistribution::Uniform).unwrap();
        let b = generate_instance(ProblemKind::Bpr, 5, 7, SizeDistribution::Uniform).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn positions_on_grid() {
        let t = generate_instance(ProblemKind::Train, 5, 7, SizeDistribution::Uniform).unwrap();
        for &p in t.positions().unwrap() {
            let k = (1.0 / p).ln() / (1.0 + POSITION_EPS).ln();
            assert!((k - k.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn dyadic_sizes() {
        let t = generate_instance(ProblemKind::Bp, 3, 1, SizeDistribution::Dyadic).unwrap();
        for &s in t.sizes() {
            assert!((1..=5).any(|k| s == 0.5f64.powi(k)));
        }
    }
}
