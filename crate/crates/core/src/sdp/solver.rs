use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::discrepancy::g_inverse;
use crate::error::{InputError, SdpError};
use crate::matrix::{DenseMatrix, DiscrepancyBounds};

pub const DEFAULT_SDP_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_SWEEPS: usize = 5000;
const MU_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    A(usize),
    B(usize),
}

/// `|| sum_j coeffs[j] v_{active[j]} || <= cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowConstraint {
    pub kind: RowKind,
    pub coeffs: Vec<f64>,
    pub cap: f64,
}

/// Vector program over the active columns. Inactive columns are pinned to zero
/// and every active vector has norm at most one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSpec {
    pub n_cols: usize,
    pub active: Vec<usize>,
    pub rows: Vec<RowConstraint>,
    pub mass_floor: f64,
}

impl SdpSpec {
    /// Vector length, equal to the number of active columns.
    pub fn dimension(&self) -> usize {
        self.active.len()
    }
}

/// Sum of weights must not exceed one (up to `1e-9`); every weight positive.
pub(crate) fn check_mu(mu: &[f64]) -> Result<(), InputError> {
    if let Some((i, m)) = mu
        .iter()
        .enumerate()
        .find(|(_, m)| !(m.is_finite() && **m > 0.0))
    {
        return Err(InputError::Range(format!("mu[{i}] = {m} must be positive")));
    }
    let total: f64 = mu.iter().sum();
    if total > 1.0 + MU_SUM_TOL {
        return Err(InputError::Range(format!("weights sum to {total} > 1")));
    }
    Ok(())
}

pub fn build_coloring_sdp(
    a: &DenseMatrix,
    b: &DenseMatrix,
    delta: &DiscrepancyBounds,
    mu: &[f64],
    active: &[usize],
) -> Result<SdpSpec, InputError> {
    let m = a.n_cols();
    if b.n_cols() != m {
        return Err(InputError::Dimension(format!(
            "A has {m} columns, B has {}",
            b.n_cols()
        )));
    }
    if delta.len() != a.n_rows() || mu.len() != b.n_rows() {
        return Err(InputError::Dimension(
            "bounds do not match the row counts".into(),
        ));
    }
    check_mu(mu)?;
    if active.is_empty() {
        return Err(InputError::Range("empty active set".into()));
    }
    if active.windows(2).any(|w| w[0] >= w[1]) || active.iter().any(|&j| j >= m) {
        return Err(InputError::Range(
            "active set must be sorted, unique and in range".into(),
        ));
    }
    let k = active.len() as f64;
    let mut rows = Vec::with_capacity(a.n_rows() + b.n_rows());
    for i in 0..a.n_rows() {
        let r = a.row(i);
        rows.push(RowConstraint {
            kind: RowKind::A(i),
            coeffs: active.iter().map(|&j| r[j]).collect(),
            cap: delta[i],
        });
    }
    for (i, &w) in mu.iter().enumerate() {
        let r = b.row(i);
        rows.push(RowConstraint {
            kind: RowKind::B(i),
            coeffs: active.iter().map(|&j| r[j]).collect(),
            cap: g_inverse(w * k / 10.0)? * k.sqrt(),
        });
    }
    Ok(SdpSpec {
        n_cols: m,
        active: active.to_vec(),
        rows,
        mass_floor: k / 2.0,
    })
}

/// One vector per column; inactive columns hold zero vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorAssignment {
    pub dimension: usize,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SdpResiduals {
    pub row: f64,
    pub mass: f64,
    pub unit: f64,
    pub pinned: f64,
}

impl SdpResiduals {
    pub fn max(&self) -> f64 {
        self.row.max(self.mass).max(self.unit).max(self.pinned)
    }
}

/// Recomputes every constraint violation of `v` against `spec` from scratch.
pub fn residuals(spec: &SdpSpec, v: &VectorAssignment) -> SdpResiduals {
    let d = v.dimension;
    let mut res = SdpResiduals::default();
    let mut is_active = vec![false; spec.n_cols];
    for &j in &spec.active {
        is_active[j] = true;
    }
    let mut mass = 0.0;
    for (j, vj) in v.vectors.iter().enumerate() {
        let n2: f64 = vj.iter().map(|x| x * x).sum();
        if is_active.get(j).copied().unwrap_or(false) {
            mass += n2;
            res.unit = res.unit.max(n2.sqrt() - 1.0);
        } else {
            res.pinned = res.pinned.max(n2.sqrt());
        }
    }
    res.mass = (spec.mass_floor - mass).max(0.0);
    for row in &spec.rows {
        let mut acc = vec![0.0; d];
        for (&c, &j) in row.coeffs.iter().zip(&spec.active) {
            for (s, x) in acc.iter_mut().zip(&v.vectors[j]) {
                *s += c * x;
            }
        }
        let norm = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
        res.row = res.row.max(norm - row.cap);
    }
    res
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SDP_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

pub fn solve_sdp_feasibility(spec: &SdpSpec, tol: f64) -> Result<VectorAssignment, SdpError> {
    solve_sdp_feasibility_with(
        spec,
        SdpOptions {
            tol,
            ..SdpOptions::default()
        },
    )
}

/// Alternating projections on the Gram matrix `X = V^T V`.
///
/// Each sweep projects onto the row halfspaces `a^T X a <= cap^2`, clips the
/// diagonal at one, lifts the trace to the mass floor and finally projects onto
/// the PSD cone. Residuals are measured on the factored vectors.
pub fn solve_sdp_feasibility_with(
    spec: &SdpSpec,
    opts: SdpOptions,
) -> Result<VectorAssignment, SdpError> {
    let k = spec.dimension();
    if k == 0 {
        return Err(InputError::Range("empty active set".into()).into());
    }
    if !(opts.tol > 0.0) {
        return Err(InputError::Range(format!("tolerance {} must be positive", opts.tol)).into());
    }
    let rows: Vec<(DVector<f64>, f64, f64)> = spec
        .rows
        .iter()
        .filter_map(|r| {
            let a = DVector::from_column_slice(&r.coeffs);
            let n2 = a.norm_squared();
            (n2 > 0.0).then_some((a, r.cap * r.cap, n2 * n2))
        })
        .collect();

    let mut x = DMatrix::<f64>::identity(k, k);
    let mut last = f64::INFINITY;
    for sweep in 0..=opts.max_sweeps {
        let v = factor(spec, &x);
        last = residuals(spec, &v).max();
        if last <= opts.tol {
            return Ok(v);
        }
        if sweep == opts.max_sweeps {
            break;
        }
        for (a, cap2, a4) in &rows {
            let q = (a.transpose() * &x * a)[(0, 0)];
            if q > *cap2 {
                let scale = (q - cap2) / a4;
                x -= scale * (a * a.transpose());
            }
        }
        for j in 0..k {
            if x[(j, j)] > 1.0 {
                x[(j, j)] = 1.0;
            }
        }
        let tr = x.trace();
        if tr < spec.mass_floor {
            let lift = (spec.mass_floor - tr) / k as f64;
            for j in 0..k {
                x[(j, j)] += lift;
            }
        }
        x = psd_projection(x);
    }
    Err(SdpError::NotConverged {
        sweeps: opts.max_sweeps,
        residual: last,
    })
}

fn psd_projection(x: DMatrix<f64>) -> DMatrix<f64> {
    let sym = (&x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lambda = eig.eigenvalues.map(|l| l.max(0.0));
    let u = eig.eigenvectors;
    &u * DMatrix::from_diagonal(&lambda) * u.transpose()
}

/// `V = U sqrt(Lambda)`; row `t` of `V` is the vector of `active[t]`.
fn factor(spec: &SdpSpec, x: &DMatrix<f64>) -> VectorAssignment {
    let k = spec.dimension();
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let mut vectors = vec![vec![0.0; k]; spec.n_cols];
    for (t, &j) in spec.active.iter().enumerate() {
        for d in 0..k {
            vectors[j][d] = eig.eigenvectors[(t, d)] * roots[d];
        }
    }
    VectorAssignment {
        dimension: k,
        vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_without_rows() {
        let s = build_coloring_sdp(
            &DenseMatrix::empty(4),
            &DenseMatrix::empty(4),
            &DiscrepancyBounds::new(vec![]).unwrap(),
            &[],
            &[0, 1, 2, 3],
        )
        .unwrap();
        assert!(s.rows.is_empty());
        assert_eq!(s.mass_floor, 2.0);
        let v = solve_sdp_feasibility(&s, 1e-6).unwrap();
        let mass: f64 = v.vectors.iter().flatten().map(|x| x * x).sum();
        assert!(mass >= 2.0 - 1e-6);
    }

    #[test]
    fn spec_caps() {
        let a = DenseMatrix::from_rows(&[vec![1.0; 4]], 4).unwrap();
        let d = DiscrepancyBounds::new(vec![3.0]).unwrap();
        let s = build_coloring_sdp(&a, &DenseMatrix::empty(4), &d, &[], &[0, 1, 2, 3]).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rows[0].cap, 3.0);

        let b = DenseMatrix::from_rows(&[vec![0.5; 40]], 40).unwrap();
        let active: Vec<usize> = (0..40).collect();
        let s = build_coloring_sdp(
            &DenseMatrix::empty(40),
            &b,
            &DiscrepancyBounds::new(vec![]).unwrap(),
            &[1.0],
            &active,
        )
        .unwrap();
        let expected = (10.0 * (9.0f64 / 4.0).ln()).sqrt() * 40f64.sqrt();
        assert!((s.rows[0].cap - expected).abs() < 1e-12);
    }

    #[test]
    fn spec_rejects_empty_active() {
        let e = DenseMatrix::empty(2);
        let d = DiscrepancyBounds::new(vec![]).unwrap();
        assert!(build_coloring_sdp(&e, &e, &d, &[], &[]).is_err());
        assert!(build_coloring_sdp(&e, &DenseMatrix::zeros(2, 2), &d, &[0.6, 0.6], &[0]).is_err());
    }

    #[test]
    fn cancelling_pair() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap();
        let spec = SdpSpec {
            n_cols: 2,
            active: vec![0, 1],
            rows: vec![RowConstraint {
                kind: RowKind::A(0),
                coeffs: a.row(0).to_vec(),
                cap: 0.0,
            }],
            mass_floor: 1.0,
        };
        let v = solve_sdp_feasibility(&spec, 1e-6).unwrap();
        assert!(residuals(&spec, &v).max() <= 1e-6);
        let sum: Vec<f64> = v.vectors[0]
            .iter()
            .zip(&v.vectors[1])
            .map(|(x, y)| x + y)
            .collect();
        assert!(sum.iter().all(|s| s.abs() < 1e-5));
    }

    #[test]
    fn inactive_columns_stay_zero() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -1.0, 0.5]], 3).unwrap();
        let d = DiscrepancyBounds::new(vec![0.5]).unwrap();
        let s = build_coloring_sdp(&a, &DenseMatrix::empty(3), &d, &[], &[0, 2]).unwrap();
        let v = solve_sdp_feasibility(&s, 1e-6).unwrap();
        assert!(v.vectors[1].iter().all(|&x| x == 0.0));
        assert!(residuals(&s, &v).max() <= 1e-6);
    }
}
