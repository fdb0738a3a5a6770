//! Doubly nonnegative relaxation bound.
//!
//! The relaxation is `min <Q,X>` over `<E,X> = 1`, `X` PSD and entrywise
//! nonnegative. It is solved approximately by ADMM on the split `X = Y` with
//! `X` PSD and `Y` in the nonnegative scaled simplex of matrices. The returned
//! value does not rely on ADMM accuracy: a dual triple `(lambda, S, N)` with
//! `Q - lambda E = S + N`, `S` PSD and `N >= 0` is built from the final
//! iterate, and any such `lambda` is a lower bound on the optimal value.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{BoundCertificate, BoundKind};
use crate::error::{Error, Result};
use crate::instance::StqpInstance;
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Initial penalty parameter.
    pub rho: f64,
    /// Problems with more rows are refused unless this is raised.
    pub max_n: usize,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 20_000,
            rho: 1.0,
            max_n: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    /// How far the certified value sits below the ADMM multiplier estimate.
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnnDual {
    /// Multiplier estimate read off the ADMM iterate, before certification.
    pub lambda_hat: f64,
    pub s: SymmetricMatrix,
    pub n: SymmetricMatrix,
    pub residuals: Residuals,
    pub iterations: usize,
    pub converged: bool,
}

impl DnnDual {
    /// `max |Q - value E - S - N|` over all entries.
    pub fn identity_residual(&self, q: &SymmetricMatrix, value: f64) -> f64 {
        let n = q.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                let r = q.get(i, j) - value - self.s.get(i, j) - self.n.get(i, j);
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue_s(&self) -> f64 {
        SymmetricEigen::new(self.s.to_nalgebra())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn project_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut vals = eig.eigenvalues.clone();
    vals.iter_mut().for_each(|v| *v = v.max(0.0));
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (c, &lam) in vals.iter().enumerate() {
        scaled.column_mut(c).scale_mut(lam);
    }
    let p = scaled * v.transpose();
    (&p + p.transpose()) * 0.5
}

/// Euclidean projection of all entries onto `{y >= 0, sum y = 1}`.
fn project_simplex(v: &DMatrix<f64>) -> DMatrix<f64> {
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    v.map(|x| (x - tau).max(0.0))
}

/// Exact certificate when the smallest entry is diagonal: `S = 0`,
/// `N = Q - gamma0 E`.
fn trivial_certificate(q: &SymmetricMatrix, gamma0: f64) -> BoundCertificate {
    let n = q.shifted(-gamma0);
    BoundCertificate {
        value: gamma0,
        kind: BoundKind::L2Certified,
        dual: Some(DnnDual {
            lambda_hat: gamma0,
            s: SymmetricMatrix::zeros(q.n()),
            n,
            residuals: Residuals {
                primal: 0.0,
                dual: 0.0,
                shift: 0.0,
            },
            iterations: 0,
            converged: true,
        }),
    }
}

/// Certified lower bound from the doubly nonnegative relaxation.
pub fn lb2(inst: &StqpInstance, cfg: &SplittingConfig) -> Result<BoundCertificate> {
    let q = &inst.q;
    let n = q.n();
    if n > cfg.max_n {
        return Err(Error::SizeLimitExceeded {
            what: "doubly nonnegative relaxation",
            n,
            limit: cfg.max_n,
        });
    }
    let gamma0 = q.min_entry();
    if gamma0 == q.min_diag() {
        return Ok(trivial_certificate(q, gamma0));
    }

    let qm = q.to_nalgebra();
    let mut y = DMatrix::from_element(n, n, 1.0 / (n * n) as f64);
    let mut z = DMatrix::<f64>::zeros(n, n);
    let mut x;
    let mut rho = cfg.rho;
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..cfg.max_iter {
        iterations = k + 1;
        x = project_psd(&(&y - (&qm + &z) / rho));
        let y_prev = y;
        y = project_simplex(&(&x + &z / rho));
        let diff = &x - &y;
        z += &diff * rho;

        primal = diff.norm();
        dual = rho * (&y - &y_prev).norm();
        let eps_p = cfg.tol * (1.0 + x.norm().max(y.norm()));
        let eps_d = cfg.tol * (1.0 + z.norm());
        if primal <= eps_p && dual <= eps_d {
            converged = true;
            break;
        }
        if k % 25 == 24 {
            if primal > 10.0 * dual {
                rho *= 2.0;
            } else if dual > 10.0 * primal {
                rho /= 2.0;
            }
        }
    }

    // At a fixed point, Z = mu E - N with N >= 0 vanishing on supp(Y), and
    // Q + Z is PSD; the multiplier estimate is lambda = -mu.
    let mu = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_hat = -mu;
    let s = SymmetricMatrix::from_nalgebra(&project_psd(&(&qm + &z)));
    let mut delta: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            delta = delta.min(q.get(i, j) - lambda_hat - s.get(i, j));
        }
    }
    let value = lambda_hat + delta;
    let mut nn = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            nn.set(i, j, (q.get(i, j) - value - s.get(i, j)).max(0.0));
        }
    }
    let admm = DnnDual {
        lambda_hat,
        s,
        n: nn,
        residuals: Residuals {
            primal,
            dual,
            shift: -delta,
        },
        iterations,
        converged,
    };
    // The closed-form bound has its own exact dual pair; keep the better one.
    let (value, dual_data) = match l1_dual(q, gamma0) {
        Some((v1, s1, n1)) if v1 > value => (
            v1,
            DnnDual {
                s: s1,
                n: n1,
                residuals: Residuals {
                    shift: (lambda_hat - v1).max(0.0),
                    ..admm.residuals
                },
                ..admm
            },
        ),
        _ => (value, admm),
    };
    Ok(BoundCertificate {
        value,
        kind: BoundKind::L2Certified,
        dual: Some(dual_data),
    })
}

/// Dual pair of the closed-form bound: with `d_k = Q_kk - gamma0` and
/// `t = 1 / sum 1/d_k`, `S = Diag(d) - tE` is PSD and `N` is the off-diagonal
/// part of `Q - gamma0 E`.
fn l1_dual(q: &SymmetricMatrix, gamma0: f64) -> Option<(f64, SymmetricMatrix, SymmetricMatrix)> {
    let n = q.n();
    let d: Vec<f64> = q.diag().iter().map(|v| v - gamma0).collect();
    if d.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let t = 1.0 / d.iter().map(|v| 1.0 / v).sum::<f64>();
    let mut s = SymmetricMatrix::zeros(n);
    let mut nn = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            s.set(i, j, -t);
            nn.set(i, j, q.get(i, j) - gamma0);
        }
        s.set(i, i, d[i] - t);
    }
    Some((gamma0 + t, s, nn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::lb1;
    use crate::instance::Origin;

    fn inst(q: SymmetricMatrix) -> StqpInstance {
        StqpInstance::new("t", q, Origin::Generated).unwrap()
    }

    fn check_certificate(inst: &StqpInstance, c: &BoundCertificate) {
        let d = c.dual.as_ref().unwrap();
        assert!(d.identity_residual(&inst.q, c.value) <= 1e-12);
        assert!(d.min_eigenvalue_s() >= -1e-9);
        let n = inst.n();
        for i in 0..n {
            for j in 0..n {
                assert!(d.n.get(i, j) >= 0.0);
            }
        }
    }

    #[test]
    fn all_ones_is_exact() {
        let e = inst(SymmetricMatrix::ones(3));
        let c = lb2(&e, &SplittingConfig::default()).unwrap();
        assert_eq!(c.value, 1.0);
        check_certificate(&e, &c);
    }

    #[test]
    fn identity_matches_analytic_dual() {
        for n in [2usize, 4] {
            let i = inst(SymmetricMatrix::identity(n));
            let c = lb2(&i, &SplittingConfig::default()).unwrap();
            assert!((c.value - 1.0 / n as f64).abs() < 1e-4, "n={n}: {}", c.value);
            assert!(c.value <= 1.0 / n as f64 + 1e-12);
            check_certificate(&i, &c);
        }
    }

    #[test]
    fn bound_is_valid_even_when_stopped_early() {
        let q =
            SymmetricMatrix::from_rows(&[vec![0.3, -0.8, 0.4], vec![-0.8, 0.1, -0.2], vec![0.4, -0.2, -0.5]]).unwrap();
        let t = inst(q);
        let cfg = SplittingConfig {
            max_iter: 3,
            ..Default::default()
        };
        let c = lb2(&t, &cfg).unwrap();
        assert!(!c.dual.as_ref().unwrap().converged);
        check_certificate(&t, &c);
        let full = lb2(&t, &SplittingConfig::default()).unwrap();
        assert!(full.value >= lb1(&t).value - 1e-9);
    }

    #[test]
    fn closed_form_dual_pair_is_a_certificate() {
        let q = SymmetricMatrix::from_rows(&[
            vec![0.09707204034271733, -0.7250867374999397],
            vec![-0.7250867374999397, -0.6769476642877488],
        ])
        .unwrap();
        let t = inst(q);
        let (v, s, nn) = l1_dual(&t.q, t.q.min_entry()).unwrap();
        assert_eq!(v, lb1(&t).value);
        let d = DnnDual {
            lambda_hat: v,
            s,
            n: nn,
            residuals: Residuals {
                primal: 0.0,
                dual: 0.0,
                shift: 0.0,
            },
            iterations: 0,
            converged: true,
        };
        let c = BoundCertificate {
            value: v,
            kind: BoundKind::L2Certified,
            dual: Some(d),
        };
        check_certificate(&t, &c);
        let full = lb2(&t, &SplittingConfig::default()).unwrap();
        assert!(full.value >= v);
        check_certificate(&t, &full);
    }

    #[test]
    fn size_limit() {
        let cfg = SplittingConfig {
            max_n: 2,
            ..Default::default()
        };
        assert!(matches!(
            lb2(&inst(SymmetricMatrix::identity(3)), &cfg),
            Err(Error::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn simplex_projection_sums_to_one() {
        let v = DMatrix::from_row_slice(2, 2, &[0.9, -0.3, -0.3, 0.8]);
        let p = project_simplex(&v);
        assert!((p.sum() - 1.0).abs() < 1e-15);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert!((p[(0, 0)] - 0.55).abs() < 1e-15);
    }
}
