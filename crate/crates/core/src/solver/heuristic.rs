//! StQP-aware primal heuristic: read the support off an LP point and solve the
//! KKT system on that face.

use crate::kkt::{lift, solve_face};
use crate::matrix::SymmetricMatrix;
use crate::milp::{MilpModel, Roles};

/// Entries of the LP `x` above this define the trial support.
pub const HEURISTIC_SUPPORT: f64 = 1e-4;

/// Point on the simplex produced by the heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicPoint {
    pub x: Vec<f64>,
    /// `x'Qx`.
    pub value: f64,
    /// Whether the point came from a nonnegative face solution rather than rounding.
    pub from_face: bool,
}

/// The quadratic form and column roles recovered from a built model.
#[derive(Debug, Clone)]
pub struct StqpView {
    pub q: SymmetricMatrix,
    pub roles: Roles,
}

impl StqpView {
    /// Reads `Q` back from the first `n` rows, which carry `(Qx)_j` in both
    /// formulations. Returns `None` for models of any other shape.
    pub fn from_model(model: &MilpModel) -> Option<Self> {
        let roles = model.roles.clone();
        let n = roles.x.len();
        let level = roles.level?;
        if n == 0 || roles.slack.len() != n || roles.y.len() != n || model.constraints.len() < n {
            return None;
        }
        let mut pos = vec![usize::MAX; model.num_vars()];
        for (i, &c) in roles.x.iter().enumerate() {
            pos[c] = i;
        }
        let mut rows = vec![vec![0.0; n]; n];
        for (j, row) in rows.iter_mut().enumerate() {
            let c = &model.constraints[j];
            let mut has_level = false;
            for &(col, a) in &c.coeffs {
                if pos[col] != usize::MAX {
                    row[pos[col]] = a;
                } else if col == level {
                    has_level = a == -1.0;
                }
            }
            if !has_level {
                return None;
            }
        }
        let q = SymmetricMatrix::from_rows(&rows).ok()?;
        Some(Self { q, roles })
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    /// Heuristic point from LP values of the `x` block.
    pub fn point_from_x(&self, xlp: &[f64]) -> HeuristicPoint {
        let n = self.n();
        let support: Vec<usize> = (0..n).filter(|&j| xlp[j] > HEURISTIC_SUPPORT).collect();
        if let Some(face) = solve_face(&self.q, &support) {
            if face.u.iter().all(|&u| u >= -1e-12) {
                let x = normalize(lift(n, &support, &face.u));
                let value = self.q.quad_form(&x);
                return HeuristicPoint {
                    x,
                    value,
                    from_face: true,
                };
            }
        }
        let x = normalize(xlp.to_vec());
        let value = self.q.quad_form(&x);
        HeuristicPoint {
            x,
            value,
            from_face: false,
        }
    }

    /// Column vector for a simplex point: `y` marks the support, the level
    /// column holds `x'Qx` and the slack block `(Qx)_j - x'Qx`.
    pub fn columns(&self, x: &[f64], value: f64, num_vars: usize) -> Vec<f64> {
        let mut v = vec![0.0; num_vars];
        let qx = self.q.mul_vec(x);
        for j in 0..self.n() {
            v[self.roles.x[j]] = x[j];
            v[self.roles.y[j]] = if x[j] > crate::SUPPORT_THRESHOLD { 1.0 } else { 0.0 };
            v[self.roles.slack[j]] = qx[j] - value;
        }
        if let Some(l) = self.roles.level {
            v[l] = value;
        }
        v
    }

    pub fn x_of(&self, values: &[f64]) -> Vec<f64> {
        self.roles.x.iter().map(|&c| values[c]).collect()
    }
}

fn normalize(mut x: Vec<f64>) -> Vec<f64> {
    for v in x.iter_mut() {
        if *v < 0.0 || !v.is_finite() {
            *v = 0.0;
        }
    }
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    } else if !x.is_empty() {
        let k = x.len() as f64;
        x.iter_mut().for_each(|v| *v = 1.0 / k);
    }
    x
}

/// Incumbent candidate from an LP solution of an StQP model.
pub fn incumbent_heuristic(model: &MilpModel, lp_values: &[f64]) -> Option<HeuristicPoint> {
    let view = StqpView::from_model(model)?;
    Some(view.point_from_x(&view.x_of(lp_values)))
}
