//! Problem data, simplex points, objective evaluation and the cheap exact
//! cases that never need a MILP.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kkt::kkt_check;
use crate::matrix::SymmetricMatrix;
use crate::solution::{SolveStats, Status, StqpSolution};
use crate::{TOL_FEAS, TOL_KKT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    File,
    Generated,
    ReducedFromGraph,
}

/// A standard quadratic program: minimize `x'Qx` over the unit simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StqpInstance {
    pub name: String,
    pub origin: Origin,
    pub q: SymmetricMatrix,
}

impl StqpInstance {
    pub fn new(name: impl Into<String>, q: SymmetricMatrix, origin: Origin) -> Result<Self> {
        if q.n() == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            name: name.into(),
            origin,
            q,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.q.n()
    }
}

/// A point of the unit simplex, validated to `TOL_FEAS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite() || **v < -TOL_FEAS) {
            return Err(Error::InvalidParameter(format!(
                "simplex point has entry {v} below -{TOL_FEAS}"
            )));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > TOL_FEAS {
            return Err(Error::InvalidParameter(format!("simplex point sums to {sum}, not 1")));
        }
        Ok(Self(x))
    }

    /// Clips negatives and rescales onto the simplex. Falls back to the
    /// barycenter when nothing positive remains.
    pub fn normalized(mut x: Vec<f64>) -> Self {
        for v in x.iter_mut() {
            if !v.is_finite() || *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = x.iter().sum();
        if sum > 0.0 {
            x.iter_mut().for_each(|v| *v /= sum);
        } else {
            let w = 1.0 / x.len() as f64;
            x.iter_mut().for_each(|v| *v = w);
        }
        Self(x)
    }

    pub fn vertex(n: usize, k: usize) -> Self {
        let mut x = vec![0.0; n];
        x[k] = 1.0;
        Self(x)
    }

    pub fn barycenter(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices with `x_j > threshold`, ascending.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > threshold)
            .map(|(j, _)| j)
            .collect()
    }
}

pub fn evaluate(inst: &StqpInstance, x: &SimplexVector) -> Result<f64> {
    if x.len() != inst.n() {
        return Err(Error::Dimension {
            expected: inst.n(),
            got: x.len(),
        });
    }
    Ok(inst.q.quad_form(x.as_slice()))
}

/// Folds a linear term into the quadratic form: returns `Q + ec' + ce'`, so
/// that `x'Qx + 2c'x` equals the returned form on the simplex.
pub fn homogenize(q: &SymmetricMatrix, c: &[f64]) -> Result<SymmetricMatrix> {
    if c.len() != q.n() {
        return Err(Error::Dimension {
            expected: q.n(),
            got: c.len(),
        });
    }
    let mut out = q.clone();
    for i in 0..q.n() {
        for j in 0..=i {
            out.set(i, j, q.get(i, j) + c[i] + c[j]);
        }
    }
    Ok(out)
}

/// Solves the instance outright when its smallest entry sits on the diagonal:
/// the vertex of that diagonal entry is then globally optimal.
pub fn preprocess_trivial(inst: &StqpInstance) -> Option<StqpSolution> {
    let q = &inst.q;
    let min_entry = q.min_entry();
    let diag = q.diag();
    let mut k = 0;
    for (j, &v) in diag.iter().enumerate() {
        if v < diag[k] {
            k = j;
        }
    }
    let dmin = diag[k];
    if dmin > min_entry {
        return None;
    }
    let x = SimplexVector::vertex(inst.n(), k);
    let cert = kkt_check(inst, &x, TOL_KKT).ok();
    Some(StqpSolution::new(
        x,
        dmin,
        cert,
        Status::Optimal,
        dmin,
        SolveStats::default(),
    ))
}
