use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::solver::{build_coloring_sdp, check_mu, solve_sdp_feasibility_with, SdpOptions};
use crate::discrepancy::{g_inverse, PartialColoring};
use crate::error::{InputError, SdpError};
use crate::matrix::{DenseMatrix, DiscrepancyBounds};

pub const DEFAULT_STEP_SIZE: f64 = 0.05;
pub const DEFAULT_BUDGET_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub step_size: f64,
    /// Overrides the iteration budget `l`.
    pub budget: Option<u64>,
    /// Use `s = 1/(n^2 sqrt(8 log(nm)))` and the uncapped budget.
    pub uncapped_schedule: bool,
    pub sdp: SdpOptions,
    /// Keep a snapshot of `chi` after every step.
    pub record_trace: bool,
    /// Negate every Gaussian sample.
    pub mirror: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            step_size: DEFAULT_STEP_SIZE,
            budget: None,
            uncapped_schedule: false,
            sdp: SdpOptions::default(),
            record_trace: false,
            mirror: false,
        }
    }
}

/// Step size, budget and freeze band actually used for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkSchedule {
    pub step_size: f64,
    pub budget: u64,
    pub freeze_band: f64,
    pub window: u64,
}

impl WalkConfig {
    pub fn schedule(&self, n_rows: usize, m: usize) -> WalkSchedule {
        let n = n_rows.max(2) as f64;
        let log_m = (m.max(2) as f64).log2();
        let s = if self.uncapped_schedule {
            1.0 / (n * n * (8.0 * (n * m.max(2) as f64).log2()).sqrt())
        } else {
            self.step_size
        };
        let natural = 20.0 * (16.0 / (s * s)) * log_m;
        // guard against 383999.99999 style truncation
        let natural = (natural * (1.0 + 1e-12)).floor();
        let budget = self.budget.unwrap_or(if self.uncapped_schedule {
            natural.min(u64::MAX as f64) as u64
        } else {
            natural.min(DEFAULT_BUDGET_CAP as f64) as u64
        });
        WalkSchedule {
            step_size: s,
            budget,
            freeze_band: 1.0 / (n * n),
            window: (16.0 / (s * s)).ceil() as u64,
        }
    }
}

/// Realized discrepancy of one phase, per B row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub r: u32,
    /// Steps `start..end` had `2^r <= |J| < 2^(r+1)` active columns.
    pub start: u64,
    pub end: u64,
    pub x: Vec<f64>,
    pub delta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseLedger {
    pub records: Vec<PhaseRecord>,
}

impl PhaseLedger {
    /// Phases must be strictly decreasing in `r` and tile the step range.
    pub fn is_consistent(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].r < w[0].r && w[1].start == w[0].end)
            && self
                .records
                .iter()
                .all(|p| p.start < p.end && p.x.len() == p.delta.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HalvingStats {
    pub windows: u64,
    pub halved: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkFailure {
    BudgetExhausted { active: usize },
    SdpNotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkOutcome {
    /// The full coloring, present on success.
    pub coloring: Option<PartialColoring>,
    pub chi: Vec<f64>,
    pub success: bool,
    pub failure: Option<WalkFailure>,
    pub steps: u64,
    pub sdp_solves: u64,
    pub schedule: WalkSchedule,
    pub ledger: PhaseLedger,
    pub halving: HalvingStats,
    pub trace: Option<Vec<Vec<f64>>>,
}

/// Random walk driven by SDP vectors; returns a full coloring on success.
///
/// The SDP is re-solved only when the active set changes.
pub fn bansal_walk(
    a: &DenseMatrix,
    b: &DenseMatrix,
    delta: &DiscrepancyBounds,
    mu: &[f64],
    config: &WalkConfig,
    seed: u64,
) -> Result<WalkOutcome, InputError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bansal_walk_with_rng(a, b, delta, mu, config, &mut rng)
}

pub fn bansal_walk_with_rng<R: Rng + ?Sized>(
    a: &DenseMatrix,
    b: &DenseMatrix,
    delta: &DiscrepancyBounds,
    mu: &[f64],
    config: &WalkConfig,
    rng: &mut R,
) -> Result<WalkOutcome, InputError> {
    let m = a.n_cols();
    if b.n_cols() != m || delta.len() != a.n_rows() || mu.len() != b.n_rows() {
        return Err(InputError::Dimension(
            "walk inputs have inconsistent shapes".into(),
        ));
    }
    check_mu(mu)?;
    if !(config.step_size > 0.0) {
        return Err(InputError::Range(format!(
            "step size {} must be positive",
            config.step_size
        )));
    }
    let schedule = config.schedule(a.n_rows() + b.n_rows(), m);
    let s = schedule.step_size;
    let band = schedule.freeze_band;

    let mut chi = vec![0.0; m];
    let mut active: Vec<usize> = (0..m).collect();
    let mut trace = config.record_trace.then(Vec::new);
    let mut ledger = PhaseLedger::default();
    let mut halving = HalvingStats::default();
    let mut window_start = m;
    let mut sdp_solves = 0u64;

    // per-B-row sum of B_i gamma_t over the current phase
    let mut phase_acc = vec![0.0; b.n_rows()];
    let mut phase: Option<(u32, u64)> = None;
    let close_phase = |ledger: &mut PhaseLedger, r: u32, start: u64, end: u64, acc: &mut [f64]| {
        let width = f64::powi(2.0, r as i32);
        let delta = mu
            .iter()
            .map(|&w| g_inverse(w * width / 10.0).unwrap_or(f64::INFINITY) * (2.0 * width).sqrt())
            .collect();
        ledger.records.push(PhaseRecord {
            r,
            start,
            end,
            x: acc.iter().map(|v| v.abs()).collect(),
            delta,
        });
        acc.iter_mut().for_each(|v| *v = 0.0);
    };

    // vectors[t] belongs to active[t]
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut stale = true;
    let mut failure = None;
    let mut gamma = vec![0.0; m];
    let mut g = Vec::new();
    let mut t = 0u64;

    while t < schedule.budget && !active.is_empty() {
        if stale {
            match solve_step_sdp(a, b, delta, mu, &active, config.sdp) {
                Ok((v, solves)) => {
                    sdp_solves += solves;
                    vectors = v;
                }
                Err(solves) => {
                    sdp_solves += solves;
                    failure = Some(WalkFailure::SdpNotConverged);
                    break;
                }
            }
            stale = false;
        }
        let k = active.len();
        let r = usize::BITS - 1 - k.leading_zeros();
        match phase {
            Some((pr, start)) if pr != r => {
                close_phase(&mut ledger, pr, start, t, &mut phase_acc);
                phase = Some((r, t));
            }
            None => phase = Some((r, t)),
            _ => {}
        }

        g.clear();
        for _ in 0..k {
            let z: f64 = rng.sample(StandardNormal);
            g.push(if config.mirror { -z } else { z });
        }
        for (idx, &j) in active.iter().enumerate() {
            let dot: f64 = vectors[idx].iter().zip(&g).map(|(v, z)| v * z).sum();
            gamma[j] = s * dot;
        }
        for (i, acc) in phase_acc.iter_mut().enumerate() {
            let row = b.row(i);
            *acc += active.iter().map(|&j| row[j] * gamma[j]).sum::<f64>();
        }

        let mut froze = false;
        for &j in &active {
            chi[j] += gamma[j];
            if chi[j] >= 1.0 - band {
                chi[j] = 1.0;
                froze = true;
            } else if chi[j] <= -1.0 + band {
                chi[j] = -1.0;
                froze = true;
            }
        }
        if froze {
            active.retain(|&j| chi[j].abs() != 1.0);
            stale = true;
        }
        t += 1;
        if let Some(tr) = trace.as_mut() {
            tr.push(chi.clone());
        }
        if t.is_multiple_of(schedule.window) || active.is_empty() {
            halving.windows += 1;
            if 2 * active.len() <= window_start {
                halving.halved += 1;
            }
            window_start = active.len();
        }
    }
    if let Some((pr, start)) = phase {
        if t > start {
            close_phase(&mut ledger, pr, start, t, &mut phase_acc);
        }
    }

    let success = active.is_empty() && failure.is_none();
    if !success && failure.is_none() {
        failure = Some(WalkFailure::BudgetExhausted {
            active: active.len(),
        });
    }
    let coloring = success.then(|| {
        PartialColoring::new(chi.iter().map(|&c| if c > 0.0 { 1 } else { -1 }).collect())
            .expect("signs are valid coloring entries")
    });
    Ok(WalkOutcome {
        coloring,
        chi,
        success,
        failure,
        steps: t,
        sdp_solves,
        schedule,
        ledger,
        halving,
        trace,
    })
}

/// Solves the step SDP; retries once at doubled tolerance.
fn solve_step_sdp(
    a: &DenseMatrix,
    b: &DenseMatrix,
    delta: &DiscrepancyBounds,
    mu: &[f64],
    active: &[usize],
    opts: SdpOptions,
) -> Result<(Vec<Vec<f64>>, u64), u64> {
    let spec = build_coloring_sdp(a, b, delta, mu, active).map_err(|_| 0u64)?;
    let mut tries = 0;
    for tol in [opts.tol, 2.0 * opts.tol] {
        tries += 1;
        match solve_sdp_feasibility_with(&spec, SdpOptions { tol, ..opts }) {
            Ok(v) => {
                return Ok((
                    active.iter().map(|&j| v.vectors[j].clone()).collect(),
                    tries,
                ))
            }
            Err(SdpError::NotConverged { .. }) => continue,
            Err(SdpError::Input(_)) => break,
        }
    }
    Err(tries)
}

/// True iff no coordinate moves after reaching `+-1` and every `|chi_j| <= 1`.
pub fn freeze_is_monotone(trace: &[Vec<f64>]) -> bool {
    let Some(first) = trace.first() else {
        return true;
    };
    let mut frozen: Vec<Option<f64>> = vec![None; first.len()];
    let mut prev_active = usize::MAX;
    for snap in trace {
        for (j, &c) in snap.iter().enumerate() {
            if c.abs() > 1.0 {
                return false;
            }
            match frozen[j] {
                Some(v) if v != c => return false,
                None if c.abs() == 1.0 => frozen[j] = Some(c),
                _ => {}
            }
        }
        let act = frozen.iter().filter(|f| f.is_none()).count();
        if act > prev_active {
            return false;
        }
        prev_active = act;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCheckLine {
    pub lambda: f64,
    pub samples: u64,
    pub exceed: u64,
    pub frequency: f64,
    /// `3 * 2^(-lambda/6)`.
    pub bound: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseReport {
    pub lines: Vec<PhaseCheckLine>,
}

impl PhaseReport {
    pub fn pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }
}

/// Empirical frequency of `X(r) > lambda delta(r)`, pooled over all phases and B rows.
pub fn phase_ledger_check(ledgers: &[PhaseLedger], lambda_grid: &[f64], slack: f64) -> PhaseReport {
    let samples: Vec<f64> = ledgers
        .iter()
        .flat_map(|l| &l.records)
        .flat_map(|p| p.x.iter().zip(&p.delta).map(|(x, d)| x / d))
        .collect();
    if samples.is_empty() {
        return PhaseReport::default();
    }
    let lines = lambda_grid
        .iter()
        .map(|&lambda| {
            let exceed = samples.iter().filter(|&&q| q > lambda).count() as u64;
            let frequency = exceed as f64 / samples.len() as f64;
            let bound = 3.0 * 2f64.powf(-lambda / 6.0);
            PhaseCheckLine {
                lambda,
                samples: samples.len() as u64,
                exceed,
                frequency,
                bound,
                limit: slack * bound,
                pass: frequency <= slack * bound,
            }
        })
        .collect();
    PhaseReport { lines }
}
