use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::basic::reduce_to_basic_with_rng;
use super::dyadic::{dyadic_snap, DEFAULT_BIT_DEPTH};
use super::instance::{append_objective_row, RoundingInstance};
use super::report::{Backend, LevelRecord, RoundingReport};
use crate::config;
use crate::discrepancy::{find_half_coloring, g_inverse, HalfColoringMode, PartialColoring};
use crate::error::{ColoringError, RoundingError};
use crate::matrix::{DenseMatrix, DiscrepancyBounds};
use crate::sdp::{bansal_walk, WalkConfig};

pub const DEFAULT_MAX_RETRIES: u32 = 64;
pub const DEFAULT_PLANE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingConfig {
    pub bit_depth: u32,
    pub max_retries: u32,
    pub c_prime: f64,
    /// Largest plane the exhaustive backend enumerates.
    pub plane_limit: usize,
    /// Larger planes go to the sdp backend instead of failing.
    pub sdp_fallback: bool,
    pub walk: WalkConfig,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        Self {
            bit_depth: DEFAULT_BIT_DEPTH,
            max_retries: DEFAULT_MAX_RETRIES,
            c_prime: config::C_PRIME,
            plane_limit: DEFAULT_PLANE_LIMIT,
            sdp_fallback: true,
            walk: WalkConfig::default(),
        }
    }
}

pub fn entropy_round(
    inst: &RoundingInstance,
    backend: Backend,
    cfg: &RoundingConfig,
    seed: u64,
) -> Result<RoundingReport, RoundingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    entropy_round_with_rng(inst, backend, cfg, &mut rng)
}

/// Rounds `x` to `y` in `{0,1}^m`, one bit level at a time from the least
/// significant bit up.
pub fn entropy_round_with_rng<R: Rng + ?Sized>(
    inst: &RoundingInstance,
    backend: Backend,
    cfg: &RoundingConfig,
    rng: &mut R,
) -> Result<RoundingReport, RoundingError> {
    let work = append_objective_row(inst);
    let basic = reduce_to_basic_with_rng(&work, rng);
    let mut q = dyadic_snap(&basic.z, cfg.bit_depth, rng)?;

    let mut levels = Vec::new();
    for k in (1..=cfg.bit_depth).rev() {
        let mut plane = q.plane(k);
        if plane.is_empty() {
            continue;
        }
        let mut record = LevelRecord {
            k,
            plane_sizes: Vec::new(),
            backend,
            retries: 0,
        };
        while !plane.is_empty() {
            record.plane_sizes.push(plane.len());
            let use_sdp = backend == Backend::Sdp || plane.len() > cfg.plane_limit;
            if use_sdp && backend == Backend::Exhaustive && !cfg.sdp_fallback {
                return Err(RoundingError::PlaneTooLarge { size: plane.len() });
            }
            let chi = if use_sdp {
                record.backend = Backend::Sdp;
                sdp_coloring(&work, &plane, k, cfg, rng, &mut record.retries)?
            } else {
                exhaustive_coloring(&work, &plane)?
            };
            let flip = rng.random_bool(0.5);
            for (&j, &c) in plane.iter().zip(chi.values()) {
                q.step(j, k, if flip { -c } else { c });
            }
            plane = q.plane(k);
        }
        levels.push(record);
    }
    debug_assert!(q.is_integral());
    let y: Vec<u8> = q.numerators().iter().map(|&v| (v != 0) as u8).collect();
    Ok(RoundingReport::assemble(
        inst,
        y,
        backend,
        levels,
        basic.fractional,
        basic.degenerate,
    ))
}

/// Row caps on plane `J`: `Delta_i` for A, `G^-1(mu_i |J| / 10) sqrt|J|` for B.
fn plane_bounds(work: &RoundingInstance, size: usize) -> Result<DiscrepancyBounds, RoundingError> {
    let k = size as f64;
    let mut caps = work.delta.as_slice().to_vec();
    for &w in &work.mu {
        caps.push(g_inverse(w * k / 10.0)? * k.sqrt());
    }
    Ok(DiscrepancyBounds::new(caps)?)
}

fn exhaustive_coloring(
    work: &RoundingInstance,
    plane: &[usize],
) -> Result<PartialColoring, RoundingError> {
    let stacked = work
        .a
        .select_columns(plane)
        .vstack(&work.b.select_columns(plane))?;
    let caps = plane_bounds(work, plane.len())?;
    match find_half_coloring(&stacked, &caps, HalfColoringMode::Pigeonhole) {
        Ok(chi) => Ok(chi),
        Err(ColoringError::NoLargeBucket { .. } | ColoringError::NoValidColoring { .. }) => Ok(
            find_half_coloring(&stacked, &caps, HalfColoringMode::Direct)?,
        ),
        Err(e) => Err(e.into()),
    }
}

fn sdp_coloring<R: Rng + ?Sized>(
    work: &RoundingInstance,
    plane: &[usize],
    k: u32,
    cfg: &RoundingConfig,
    rng: &mut R,
    retries: &mut u32,
) -> Result<PartialColoring, RoundingError> {
    let a = work.a.select_columns(plane);
    let b = work.b.select_columns(plane);
    let (n, m) = (work.n_rows(), work.n_cols());
    loop {
        let out = bansal_walk(&a, &b, &work.delta, &work.mu, &cfg.walk, rng.random())?;
        if let Some(chi) = out.coloring {
            if goodness_parts(
                chi.values(),
                &a,
                &b,
                work.delta.as_slice(),
                &work.mu,
                cfg.c_prime,
                n,
                m,
            ) {
                return Ok(chi);
            }
        }
        *retries += 1;
        if *retries >= cfg.max_retries {
            return Err(RoundingError::RetriesExhausted {
                level: k,
                retries: *retries,
            });
        }
    }
}

fn log2_at_least_one(v: usize) -> f64 {
    (v.max(2) as f64).log2()
}

#[allow(clippy::too_many_arguments)]
fn goodness_parts(
    chi: &[i8],
    a: &DenseMatrix,
    b: &DenseMatrix,
    delta: &[f64],
    mu: &[f64],
    c_prime: f64,
    n: usize,
    m: usize,
) -> bool {
    let scale = c_prime * log2_at_least_one(n).sqrt() * log2_at_least_one(m).sqrt();
    (0..a.n_rows()).all(|i| a.row_dot_signs(i, chi).abs() <= scale * delta[i])
        && (0..b.n_rows())
            .all(|i| b.row_dot_signs(i, chi).abs() <= c_prime * (2.0 / mu[i]).log2() / mu[i].sqrt())
}

/// `|A_i chi| <= C' sqrt(log n) sqrt(log m) Delta_i` and
/// `|B_i chi| <= C' log(2/mu_i) / sqrt(mu_i)`, logs base 2 floored at `log 2`.
pub fn goodness_check(chi: &PartialColoring, inst: &RoundingInstance, c_prime: f64) -> bool {
    chi.len() == inst.n_cols()
        && goodness_parts(
            chi.values(),
            &inst.a,
            &inst.b,
            inst.delta.as_slice(),
            &inst.mu,
            c_prime,
            inst.n_rows(),
            inst.n_cols(),
        )
}
