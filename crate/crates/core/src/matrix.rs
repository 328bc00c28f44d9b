use serde::{Deserialize, Serialize};

use crate::error::InputError;

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![0.0; n_rows * n_cols],
        }
    }

    /// An `n_rows x 0` or `0 x n_cols` matrix is allowed; rows carry no constraints then.
    pub fn empty(n_cols: usize) -> Self {
        Self::zeros(0, n_cols)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(
        n_rows: usize,
        n_cols: usize,
        entries: Vec<f64>,
    ) -> Result<Self, InputError> {
        if entries.len() != n_rows * n_cols {
            return Err(InputError::Dimension(format!(
                "expected {} entries for a {n_rows}x{n_cols} matrix, got {}",
                n_rows * n_cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            return Err(InputError::NonFinite(format!("matrix entry #{bad}")));
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    /// Builds a matrix from rows; `n_cols` is needed to size a matrix with no rows.
    pub fn from_rows(rows: &[Vec<f64>], n_cols: usize) -> Result<Self, InputError> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_cols) {
            return Err(InputError::Dimension(format!(
                "row {i} has {} entries, expected {n_cols}",
                r.len()
            )));
        }
        Self::from_row_major(rows.len(), n_cols, rows.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// `A_i v` for a real vector `v` of length `n_cols`.
    pub fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.n_cols);
        self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `A_i chi` for a coloring in {-1, 0, +1}.
    pub fn row_dot_signs(&self, i: usize, chi: &[i8]) -> f64 {
        debug_assert_eq!(chi.len(), self.n_cols);
        self.row(i)
            .iter()
            .zip(chi)
            .map(|(a, &c)| match c {
                1 => *a,
                -1 => -*a,
                _ => 0.0,
            })
            .sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.row_dot(i, v)).collect()
    }

    pub fn row_norm2(&self, i: usize) -> f64 {
        self.row(i).iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Column submatrix `A^J`, columns in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(self.n_rows * cols.len());
        for i in 0..self.n_rows {
            let row = self.row(i);
            entries.extend(cols.iter().map(|&j| row[j]));
        }
        Self {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            entries,
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self, InputError> {
        if self.n_cols != other.n_cols {
            return Err(InputError::Dimension(format!(
                "cannot stack {} columns on {} columns",
                other.n_cols, self.n_cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self {
            n_rows: self.n_rows + other.n_rows,
            n_cols: self.n_cols,
            entries,
        })
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<(), InputError> {
        if row.len() != self.n_cols {
            return Err(InputError::Dimension(format!(
                "row has {} entries, expected {}",
                row.len(),
                self.n_cols
            )));
        }
        self.entries.extend_from_slice(row);
        self.n_rows += 1;
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.n_cols + j]
    }
}

impl TryFrom<Vec<Vec<f64>>> for DenseMatrix {
    type Error = InputError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        let n_cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(&rows, n_cols)
    }
}

impl From<DenseMatrix> for Vec<Vec<f64>> {
    fn from(m: DenseMatrix) -> Self {
        m.to_rows()
    }
}

/// Per-row discrepancy allowances `Delta_i > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscrepancyBounds(Vec<f64>);

impl DiscrepancyBounds {
    pub fn new(delta: Vec<f64>) -> Result<Self, InputError> {
        if let Some((i, d)) = delta
            .iter()
            .enumerate()
            .find(|(_, d)| !(d.is_finite() && **d > 0.0))
        {
            return Err(InputError::Range(format!(
                "delta[{i}] = {d} must be positive and finite"
            )));
        }
        Ok(Self(delta))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self, InputError> {
        Self::new(vec![value; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation, used when stacking matrices.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }
}

impl std::ops::Index<usize> for DiscrepancyBounds {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for DiscrepancyBounds {
    type Error = InputError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<DiscrepancyBounds> for Vec<f64> {
    fn from(d: DiscrepancyBounds) -> Self {
        d.0
    }
}
