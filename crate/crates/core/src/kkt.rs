//! First-order optimality on the simplex.
//!
//! At a KKT point `x` there are `lambda` and `s >= 0` with `Qx - lambda e - s = 0`
//! and `x_j s_j = 0`; then `x'Qx = lambda`. On a fixed support `P` the
//! conditions reduce to the linear system `Q_PP u = lambda e, e'u = 1`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{SimplexVector, StqpInstance};
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktCertificate {
    pub lambda: f64,
    /// Reduced costs `s = Qx - lambda e`.
    pub s: Vec<f64>,
    pub max_dual_violation: f64,
    pub max_comp_violation: f64,
}

impl KktCertificate {
    pub fn is_valid(&self, tol_kkt: f64) -> bool {
        self.max_dual_violation <= tol_kkt && self.max_comp_violation <= tol_kkt
    }
}

/// Builds the KKT certificate of `x` with `lambda` fixed to `x'Qx`.
pub fn kkt_check(inst: &StqpInstance, x: &SimplexVector, _tol_kkt: f64) -> Result<KktCertificate> {
    if x.len() != inst.n() {
        return Err(Error::Dimension {
            expected: inst.n(),
            got: x.len(),
        });
    }
    let xs = x.as_slice();
    let qx = inst.q.mul_vec(xs);
    let lambda = inst.q.quad_form(xs);
    let s: Vec<f64> = qx.iter().map(|v| v - lambda).collect();
    let max_dual_violation = s.iter().fold(0.0_f64, |m, &v| m.max(-v));
    let max_comp_violation = s.iter().zip(xs).fold(0.0_f64, |m, (a, b)| m.max((a * b).abs()));
    Ok(KktCertificate {
        lambda,
        s,
        max_dual_violation,
        max_comp_violation,
    })
}

/// Solution of the KKT system restricted to a support.
#[derive(Debug, Clone)]
pub struct FaceSolution {
    /// Weights on the support, in support order.
    pub u: Vec<f64>,
    pub lambda: f64,
}

/// Relative pivot size below which a face system counts as singular.
const SINGULAR_PIVOT: f64 = 1e-12;

/// Solves `Q_PP u = lambda e, e'u = 1`. Returns `None` for singular systems.
pub fn solve_face(q: &SymmetricMatrix, support: &[usize]) -> Option<FaceSolution> {
    let k = support.len();
    if k == 0 {
        return None;
    }
    if k == 1 {
        let j = support[0];
        return Some(FaceSolution {
            u: vec![1.0],
            lambda: q.get(j, j),
        });
    }
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut scale: f64 = 1.0;
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            let v = q.get(i, j);
            scale = scale.max(v.abs());
            a[(r, c)] = v;
        }
        a[(r, k)] = -1.0;
        a[(k, r)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let lu = a.lu();
    let u_diag = lu.u().diagonal();
    let min_pivot = u_diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_pivot <= SINGULAR_PIVOT * scale {
        return None;
    }
    let sol = lu.solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(FaceSolution {
        u: sol.as_slice()[..k].to_vec(),
        lambda: sol[k],
    })
}

/// Lifts support weights into a full-length vector.
pub fn lift(n: usize, support: &[usize], u: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (&j, &v) in support.iter().zip(u) {
        x[j] = v;
    }
    x
}

/// Returns `(min, max)` of `(Qx)_j` over the support of `x` (threshold `tol`).
pub fn support_sandwich(q: &SymmetricMatrix, x: &[f64], tol: f64) -> (f64, f64) {
    let qx = q.mul_vec(x);
    x.iter()
        .zip(&qx)
        .filter(|(xj, _)| **xj > tol)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, &v)| {
            (lo.min(v), hi.max(v))
        })
}
