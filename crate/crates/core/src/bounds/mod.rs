//! Lower bounds on the optimal value and the big-M constants derived from them.

mod dnn;

pub use dnn::{lb2, DnnDual, Residuals, SplittingConfig};

use serde::{Deserialize, Serialize};

use crate::instance::StqpInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    L1,
    L2Certified,
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub value: f64,
    pub kind: BoundKind,
    /// Dual objects backing an `L2Certified` bound.
    pub dual: Option<DnnDual>,
}

impl BoundCertificate {
    pub fn user(value: f64) -> Self {
        Self {
            value,
            kind: BoundKind::UserSupplied,
            dual: None,
        }
    }
}

/// Closed-form bound: `gamma0 + 1 / sum_k 1/(Q_kk - gamma0)` where `gamma0` is
/// the smallest entry, collapsing to `gamma0` when that entry is diagonal.
pub fn lb1(inst: &StqpInstance) -> BoundCertificate {
    let q = &inst.q;
    let gamma0 = q.min_entry();
    let gamma1 = q.min_diag();
    let value = if gamma0 == gamma1 {
        gamma0
    } else {
        // Every Q_kk - gamma0 is strictly positive here.
        let recip: f64 = q.diag().iter().map(|d| 1.0 / (d - gamma0)).sum();
        gamma0 + 1.0 / recip
    };
    BoundCertificate {
        value,
        kind: BoundKind::L1,
        dual: None,
    }
}

/// Per-column big-M constants `M_j = max_i Q_ij - l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigMVector {
    pub m: Vec<f64>,
    pub lower_bound_used: BoundCertificate,
}

pub fn big_m(inst: &StqpInstance, lb: &BoundCertificate) -> BigMVector {
    let q = &inst.q;
    BigMVector {
        m: (0..q.n()).map(|j| q.col_max(j) - lb.value).collect(),
        lower_bound_used: lb.clone(),
    }
}

/// Box for the level variable (`lambda` or `alpha`): `[l, min_k Q_kk]`.
pub fn lambda_bounds(inst: &StqpInstance, lb: &BoundCertificate) -> (f64, f64) {
    (lb.value, inst.q.min_diag())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Origin;
    use crate::matrix::SymmetricMatrix;

    fn inst(q: SymmetricMatrix) -> StqpInstance {
        StqpInstance::new("t", q, Origin::Generated).unwrap()
    }

    #[test]
    fn lb1_examples() {
        let v = lb1(&inst(SymmetricMatrix::diagonal(&[2.0, 3.0]))).value;
        assert!((v - 1.2).abs() < 1e-15);
        let v = lb1(&inst(
            SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap(),
        ))
        .value;
        assert_eq!(v, 1.0);
        assert_eq!(lb1(&inst(SymmetricMatrix::identity(2))).value, 0.5);
    }

    #[test]
    fn lb1_shift_covariance() {
        let q = SymmetricMatrix::from_rows(&[vec![0.5, -1.0], vec![-1.0, 2.0]]).unwrap();
        let base = lb1(&inst(q.clone())).value;
        let shifted = lb1(&inst(q.shifted(3.25))).value;
        assert!((shifted - base - 3.25).abs() < 1e-12);
    }

    #[test]
    fn big_m_examples() {
        let i2 = inst(SymmetricMatrix::identity(2));
        assert_eq!(big_m(&i2, &BoundCertificate::user(0.0)).m, vec![1.0, 1.0]);

        let d = inst(SymmetricMatrix::diagonal(&[2.0, 3.0]));
        let m = big_m(&d, &BoundCertificate::user(1.2)).m;
        assert!((m[0] - 0.8).abs() < 1e-15 && (m[1] - 1.8).abs() < 1e-15);

        let e = inst(SymmetricMatrix::ones(3));
        assert_eq!(big_m(&e, &BoundCertificate::user(1.0)).m, vec![0.0; 3]);
    }

    #[test]
    fn lambda_bounds_examples() {
        let i2 = inst(SymmetricMatrix::identity(2));
        assert_eq!(lambda_bounds(&i2, &lb1(&i2)), (0.5, 1.0));
        let e = inst(SymmetricMatrix::ones(3));
        assert_eq!(lambda_bounds(&e, &lb1(&e)), (1.0, 1.0));
        let d = inst(SymmetricMatrix::diagonal(&[2.0, 3.0]));
        let (lo, hi) = lambda_bounds(&d, &lb1(&d));
        assert!((lo - 1.2).abs() < 1e-15);
        assert_eq!(hi, 2.0);
    }
}
