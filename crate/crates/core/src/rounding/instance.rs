use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::matrix::{DenseMatrix, DiscrepancyBounds};
use crate::sdp::solver::check_mu;

/// `(A, B, Delta, mu, c, x)` handed to the rounding engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct RoundingInstance {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub delta: DiscrepancyBounds,
    pub mu: Vec<f64>,
    pub c: Vec<f64>,
    pub x: Vec<f64>,
}

#[derive(Deserialize)]
struct RawInstance {
    #[serde(default)]
    a: Vec<Vec<f64>>,
    #[serde(default)]
    b: Vec<Vec<f64>>,
    #[serde(default)]
    delta: Vec<f64>,
    #[serde(default)]
    mu: Vec<f64>,
    #[serde(default)]
    c: Option<Vec<f64>>,
    x: Vec<f64>,
}

impl TryFrom<RawInstance> for RoundingInstance {
    type Error = InputError;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        let m = raw.x.len();
        Self::new(
            DenseMatrix::from_rows(&raw.a, m)?,
            DenseMatrix::from_rows(&raw.b, m)?,
            DiscrepancyBounds::new(raw.delta)?,
            raw.mu,
            raw.c.unwrap_or_else(|| vec![0.0; m]),
            raw.x,
        )
    }
}

impl RoundingInstance {
    pub fn new(
        a: DenseMatrix,
        b: DenseMatrix,
        delta: DiscrepancyBounds,
        mu: Vec<f64>,
        c: Vec<f64>,
        x: Vec<f64>,
    ) -> Result<Self, InputError> {
        let m = x.len();
        // matrices without rows carry no column count of their own
        let a = if a.n_rows() == 0 {
            DenseMatrix::empty(m)
        } else {
            a
        };
        let b = if b.n_rows() == 0 {
            DenseMatrix::empty(m)
        } else {
            b
        };
        if a.n_cols() != m || b.n_cols() != m || c.len() != m {
            return Err(InputError::Dimension(format!(
                "x has {m} entries; A, B and c have {}, {} and {} columns",
                a.n_cols(),
                b.n_cols(),
                c.len()
            )));
        }
        if delta.len() != a.n_rows() {
            return Err(InputError::Dimension(format!(
                "{} bounds for {} rows of A",
                delta.len(),
                a.n_rows()
            )));
        }
        if mu.len() != b.n_rows() {
            return Err(InputError::Dimension(format!(
                "{} weights for {} rows of B",
                mu.len(),
                b.n_rows()
            )));
        }
        check_mu(&mu)?;
        if b.max_abs() > 1.0 {
            return Err(InputError::Range("entries of B must lie in [-1, 1]".into()));
        }
        if let Some(v) = c.iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(InputError::Range(format!(
                "objective entry {v} outside [-1, 1]"
            )));
        }
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(InputError::Range(format!("x entry {v} outside [0, 1]")));
        }
        Ok(Self {
            a,
            b,
            delta,
            mu,
            c,
            x,
        })
    }

    pub fn n_cols(&self) -> usize {
        self.x.len()
    }

    /// `n_A + n_B`.
    pub fn n_rows(&self) -> usize {
        self.a.n_rows() + self.b.n_rows()
    }
}

/// Moves `c` into `B` with weight 1/2 and halves the other weights.
pub fn append_objective_row(inst: &RoundingInstance) -> RoundingInstance {
    let mut b = inst.b.clone();
    b.push_row(&inst.c).expect("c has one entry per column");
    let mut mu: Vec<f64> = inst.mu.iter().map(|w| w / 2.0).collect();
    mu.push(0.5);
    RoundingInstance {
        a: inst.a.clone(),
        b,
        delta: inst.delta.clone(),
        mu,
        c: inst.c.clone(),
        x: inst.x.clone(),
    }
}
