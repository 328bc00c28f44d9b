use serde::{Deserialize, Serialize};

use super::instance::RoundingInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exhaustive,
    Sdp,
}

/// What happened at one bit level with a non-empty plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub k: u32,
    /// Plane size before each coloring.
    pub plane_sizes: Vec<usize>,
    pub backend: Backend,
    pub retries: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingReport {
    pub y: Vec<u8>,
    pub a_discrepancy: Vec<f64>,
    pub b_discrepancy: Vec<f64>,
    pub objective_gap: f64,
    pub backend: Backend,
    pub levels: Vec<LevelRecord>,
    /// `n_A + n_B` and `m` of the input instance.
    pub n: usize,
    pub m: usize,
    pub delta: Vec<f64>,
    /// `log2(min{2n, 2m}) * Delta_i`.
    pub bound_raw: Vec<f64>,
    /// `log2(min{4n, 4m}) * Delta_i`.
    pub bound_adjusted: Vec<f64>,
    pub basic_fractional: usize,
    pub basic_degenerate: bool,
}

pub(crate) fn log_factor(n: usize, m: usize, mult: usize) -> f64 {
    ((mult * n.max(1)).min(mult * m.max(1)) as f64).log2()
}

impl RoundingReport {
    /// Builds the report; every discrepancy is recomputed from `x` and `y`.
    pub(crate) fn assemble(
        inst: &RoundingInstance,
        y: Vec<u8>,
        backend: Backend,
        levels: Vec<LevelRecord>,
        basic_fractional: usize,
        basic_degenerate: bool,
    ) -> Self {
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let diff = |row: &[f64]| -> f64 {
            row.iter()
                .zip(&inst.x)
                .zip(&yf)
                .map(|((a, x), y)| a * (x - y))
                .sum::<f64>()
                .abs()
        };
        let (n, m) = (inst.n_rows(), inst.n_cols());
        let delta = inst.delta.as_slice().to_vec();
        let raw = log_factor(n, m, 2);
        let adj = log_factor(n, m, 4);
        Self {
            a_discrepancy: inst.a.rows().map(diff).collect(),
            b_discrepancy: inst.b.rows().map(diff).collect(),
            objective_gap: diff(&inst.c),
            y,
            backend,
            levels,
            n,
            m,
            bound_raw: delta.iter().map(|d| raw * d).collect(),
            bound_adjusted: delta.iter().map(|d| adj * d).collect(),
            delta,
            basic_fractional,
            basic_degenerate,
        }
    }

    /// `|A_i x - A_i y| <= log2(min{4n,4m}) Delta_i` on every row.
    pub fn within_deterministic_bound(&self) -> bool {
        self.a_discrepancy
            .iter()
            .zip(&self.bound_adjusted)
            .all(|(d, b)| *d <= b + 1e-9)
    }

    /// Within each exhaustive level the plane at least halves per coloring.
    pub fn planes_halve(&self) -> bool {
        self.levels
            .iter()
            .filter(|l| l.backend == Backend::Exhaustive)
            .all(|l| l.plane_sizes.windows(2).all(|w| w[1] <= w[0].div_ceil(2)))
    }

    pub fn total_retries(&self) -> u32 {
        self.levels.iter().map(|l| l.retries).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailLine {
    pub row: usize,
    pub lambda: f64,
    pub runs: u64,
    pub exceed: u64,
    pub frequency: f64,
    /// `2 exp(-lambda^2 / 2)`.
    pub bound: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TailReport {
    pub lines: Vec<TailLine>,
}

impl TailReport {
    pub fn pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }
}

/// Frequency of `|A_i x - A_i y| >= lambda sqrt(log2 min{4n,4m}) Delta_i` per row and lambda.
pub fn tail_report(runs: &[RoundingReport], lambda_grid: &[f64], slack: f64) -> TailReport {
    let Some(first) = runs.first() else {
        return TailReport::default();
    };
    let scale = log_factor(first.n, first.m, 4).sqrt();
    let mut lines = Vec::new();
    for (row, delta) in first.delta.iter().enumerate() {
        for &lambda in lambda_grid {
            let threshold = lambda * scale * delta;
            let exceed = runs
                .iter()
                .filter(|r| r.a_discrepancy[row] >= threshold)
                .count() as u64;
            let frequency = exceed as f64 / runs.len() as f64;
            let bound = 2.0 * (-lambda * lambda / 2.0).exp();
            lines.push(TailLine {
                row,
                lambda,
                runs: runs.len() as u64,
                exceed,
                frequency,
                bound,
                limit: slack * bound,
                pass: frequency <= slack * bound,
            });
        }
    }
    TailReport { lines }
}
