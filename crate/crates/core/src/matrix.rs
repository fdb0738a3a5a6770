use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense symmetric matrix storing only the lower triangle, row-major.
///
/// Entry `(i, j)` and `(j, i)` read the same storage cell, so symmetry holds
/// exactly. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LowerTriangle", into = "LowerTriangle")]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m.set(k, k, 1.0);
        }
        m
    }

    /// The all-ones matrix `E`.
    pub fn ones(n: usize) -> Self {
        Self {
            n,
            data: vec![1.0; n * (n + 1) / 2],
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (k, &v) in d.iter().enumerate() {
            m.set(k, k, v);
        }
        m
    }

    /// Builds from a full square array, checking exact symmetry and finiteness.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if j < i && rows[j][i] != v {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                if j <= i {
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    /// Builds from lower-triangle rows: row `i` holds entries `(i, 0..=i)`.
    pub fn from_lower_triangle(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::Dimension {
                    expected: i + 1,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data.push(v);
            }
        }
        Ok(Self { n, data })
    }

    pub fn lower_triangle(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..=i).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[tri(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[tri(i, j)] = v;
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.get(k, k)).collect()
    }

    /// Smallest entry over `i <= j` (every distinct entry).
    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_diag(&self) -> f64 {
        (0..self.n).map(|k| self.get(k, k)).fold(f64::INFINITY, f64::min)
    }

    /// Maximum entry in column `j`.
    pub fn col_max(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..i {
                row += self.get(i, j) * x[j];
            }
            acc += xi * (2.0 * row + self.get(i, i) * xi);
        }
        acc
    }

    /// `self + gamma * E`.
    pub fn shifted(&self, gamma: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v + gamma).collect(),
        }
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate().take(a + 1) {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Symmetrizes a dense matrix by averaging `(i,j)` and `(j,i)`.
    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut s = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                s.set(i, j, 0.5 * (m[(i, j)] + m[(j, i)]));
            }
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct LowerTriangle {
    n: usize,
    lower_triangle: Vec<Vec<f64>>,
}

impl TryFrom<LowerTriangle> for SymmetricMatrix {
    type Error = Error;

    fn try_from(value: LowerTriangle) -> Result<Self> {
        if value.lower_triangle.len() != value.n {
            return Err(Error::Dimension {
                expected: value.n,
                got: value.lower_triangle.len(),
            });
        }
        Self::from_lower_triangle(&value.lower_triangle)
    }
}

impl From<SymmetricMatrix> for LowerTriangle {
    fn from(m: SymmetricMatrix) -> Self {
        Self {
            n: m.n,
            lower_triangle: m.lower_triangle(),
        }
    }
}
