//! Dense revised simplex for bounded-variable LPs.
//!
//! Every row `i` gets a logical column `r_i` so that rows read `A x + r = b`;
//! `<=` rows give `r_i >= 0`, `>=` rows give `r_i <= 0`, equality rows fix
//! `r_i = 0`. The basis inverse is kept explicitly and updated in product form,
//! with a fresh factorization every `REFACTOR_EVERY` pivots. Optimization runs
//! the dual simplex to reach primal feasibility (temporarily zeroing any
//! reduced cost that cannot be made dual feasible by a bound flip), then the
//! primal simplex with the true costs.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::{MilpModel, Relation};

pub const PIVOT_TOL: f64 = 1e-9;
pub const FEAS_TOL: f64 = 1e-9;
pub const DUAL_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column held at zero.
    Free,
}

/// Basis snapshot used for warm starts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Basis {
    /// Column index basic in each row position.
    pub basic: Vec<usize>,
    /// Status of every column, structural then logical.
    pub status: Vec<VarStatus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    /// Structural column values.
    pub values: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

/// Column-sparse copy of a model's constraint matrix with logical columns.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub num_struct: usize,
    pub num_rows: usize,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Structural columns as `(row, coefficient)`.
    cols: Vec<Vec<(usize, f64)>>,
    /// Rows as `(structural column, coefficient)`.
    rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
}

impl LpProblem {
    /// LP relaxation of a model: integrality dropped, bounds kept.
    pub fn from_model(model: &MilpModel) -> Self {
        let ns = model.num_vars();
        let m = model.num_constraints();
        let mut cost = vec![0.0; ns + m];
        for &(i, c) in &model.objective {
            cost[i] += c;
        }
        let mut lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
        let mut upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
        let mut cols = vec![Vec::new(); ns];
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (r, c) in model.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                cols[j].push((r, a));
            }
            rows.push(c.coeffs.clone());
            rhs.push(c.rhs);
            let (lo, hi) = match c.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
        }
        Self {
            num_struct: ns,
            num_rows: m,
            cost,
            lower,
            upper,
            cols,
            rows,
            rhs,
        }
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.num_struct + self.num_rows
    }

    /// All-logical starting basis.
    pub fn slack_basis(&self) -> Basis {
        let n = self.num_cols();
        let mut status = vec![VarStatus::AtLower; n];
        for (j, st) in status.iter_mut().enumerate().take(self.num_struct) {
            *st = default_status(self.lower[j], self.upper[j], self.cost[j]);
        }
        let basic: Vec<usize> = (self.num_struct..n).collect();
        for &j in &basic {
            status[j] = VarStatus::Basic;
        }
        Basis { basic, status }
    }

    /// `sum_i v_i * A[i, j]` for column `j` (structural or logical).
    #[inline]
    fn dot_col(&self, v: &[f64], j: usize) -> f64 {
        if j < self.num_struct {
            self.cols[j].iter().map(|&(i, a)| v[i] * a).sum()
        } else {
            v[j - self.num_struct]
        }
    }
}

fn default_status(lo: f64, hi: f64, cost: f64) -> VarStatus {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if cost < 0.0 {
                VarStatus::AtUpper
            } else {
                VarStatus::AtLower
            }
        }
        (true, false) => VarStatus::AtLower,
        (false, true) => VarStatus::AtUpper,
        (false, false) => VarStatus::Free,
    }
}

/// Working state of one LP solve.
#[derive(Clone)]
pub struct LpSolver<'a> {
    prob: &'a LpProblem,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    basic: Vec<usize>,
    status: Vec<VarStatus>,
    /// Row-major basis inverse; row `r` belongs to `basic[r]`.
    binv: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
    pivots_since_refactor: usize,
    iterations: usize,
    max_iterations: usize,
}

impl<'a> LpSolver<'a> {
    pub fn new(prob: &'a LpProblem) -> Self {
        let n = prob.num_cols();
        let m = prob.num_rows;
        Self {
            prob,
            lower: prob.lower.clone(),
            upper: prob.upper.clone(),
            cost: prob.cost.clone(),
            basic: Vec::new(),
            status: Vec::new(),
            binv: vec![0.0; m * m],
            x: vec![0.0; n],
            d: vec![0.0; n],
            pivots_since_refactor: 0,
            iterations: 0,
            max_iterations: 50 * (n + m) + 10_000,
        }
    }

    /// Overrides the bounds of a structural column.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn reset_bounds(&mut self) {
        self.lower.copy_from_slice(&self.prob.lower);
        self.upper.copy_from_slice(&self.prob.upper);
    }

    /// Installs a basis and factorizes it; falls back to the slack basis when
    /// the given one is singular.
    pub fn load_basis(&mut self, basis: &Basis) {
        self.basic = basis.basic.clone();
        self.status = basis.status.clone();
        if self.refactor().is_err() {
            let b = self.prob.slack_basis();
            self.basic = b.basic;
            self.status = b.status;
            self.refactor().expect("identity basis is nonsingular");
        }
    }

    pub fn basis(&self) -> Basis {
        Basis {
            basic: self.basic.clone(),
            status: self.status.clone(),
        }
    }

    pub fn has_basis(&self) -> bool {
        self.status.len() == self.prob.num_cols()
    }

    /// Rebuilds the explicit inverse. Basic logical columns are unit vectors,
    /// so only the square kernel of basic structural columns against rows
    /// whose logical is nonbasic needs an LU factorization.
    fn refactor(&mut self) -> Result<()> {
        let p = self.prob;
        let m = p.num_rows;
        let ns = p.num_struct;
        let mut slack_basic_row = vec![false; m];
        let mut struct_pos = Vec::new();
        for (pos, &j) in self.basic.iter().enumerate() {
            if j >= ns {
                slack_basic_row[j - ns] = true;
            } else {
                struct_pos.push(pos);
            }
        }
        let kernel_rows: Vec<usize> = (0..m).filter(|&i| !slack_basic_row[i]).collect();
        let k = kernel_rows.len();
        if k != struct_pos.len() {
            return Err(Error::NumericalFailure("basis size mismatch".into()));
        }
        let mut row_in_kernel = vec![usize::MAX; m];
        for (t, &i) in kernel_rows.iter().enumerate() {
            row_in_kernel[i] = t;
        }
        let mut kinv = DMatrix::<f64>::zeros(k, k);
        if k > 0 {
            let mut kmat = DMatrix::<f64>::zeros(k, k);
            for (t, &pos) in struct_pos.iter().enumerate() {
                for &(i, a) in &p.cols[self.basic[pos]] {
                    let r = row_in_kernel[i];
                    if r != usize::MAX {
                        kmat[(r, t)] = a;
                    }
                }
            }
            kinv = kmat
                .try_inverse()
                .ok_or_else(|| Error::NumericalFailure("singular basis".into()))?;
            if kinv.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalFailure("singular basis".into()));
            }
        }
        self.binv.iter_mut().for_each(|v| *v = 0.0);
        for (t, &pos) in struct_pos.iter().enumerate() {
            let row = &mut self.binv[pos * m..(pos + 1) * m];
            for (s, &i) in kernel_rows.iter().enumerate() {
                row[i] = kinv[(t, s)];
            }
        }
        // Logical basic in row i: e_i' - A[i, C] * Kinv (scattered on kernel rows).
        let mut pos_of_struct = vec![usize::MAX; ns];
        for (t, &pos) in struct_pos.iter().enumerate() {
            pos_of_struct[self.basic[pos]] = t;
        }
        for (pos, &j) in self.basic.iter().enumerate() {
            if j < ns {
                continue;
            }
            let i = j - ns;
            let mut row = vec![0.0; m];
            row[i] = 1.0;
            for &(c, a) in &p.rows[i] {
                let t = pos_of_struct[c];
                if t == usize::MAX {
                    continue;
                }
                for (s, &ri) in kernel_rows.iter().enumerate() {
                    row[ri] -= a * kinv[(t, s)];
                }
            }
            self.binv[pos * m..(pos + 1) * m].copy_from_slice(&row);
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    /// Places nonbasic columns on a bound consistent with the current box.
    fn normalize_statuses(&mut self) {
        for j in 0..self.prob.num_cols() {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            let st = &mut self.status[j];
            match *st {
                VarStatus::Basic => {}
                VarStatus::AtLower if !lo.is_finite() => {
                    *st = if hi.is_finite() {
                        VarStatus::AtUpper
                    } else {
                        VarStatus::Free
                    }
                }
                VarStatus::AtUpper if !hi.is_finite() => {
                    *st = if lo.is_finite() {
                        VarStatus::AtLower
                    } else {
                        VarStatus::Free
                    }
                }
                VarStatus::Free if lo.is_finite() => *st = VarStatus::AtLower,
                VarStatus::Free if hi.is_finite() => *st = VarStatus::AtUpper,
                _ => {}
            }
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lower[j],
            VarStatus::AtUpper => self.upper[j],
            _ => 0.0,
        }
    }

    /// Recomputes primal values and reduced costs from the inverse.
    fn recompute(&mut self) {
        let p = self.prob;
        let m = p.num_rows;
        let n = p.num_cols();
        let mut resid = p.rhs.clone();
        for j in 0..n {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            self.x[j] = v;
            if v != 0.0 {
                if j < p.num_struct {
                    for &(i, a) in &p.cols[j] {
                        resid[i] -= a * v;
                    }
                } else {
                    resid[j - p.num_struct] -= v;
                }
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.x[self.basic[r]] = row.iter().zip(&resid).map(|(a, b)| a * b).sum();
        }
        // pi' = c_B' B^-1
        let mut pi = vec![0.0; m];
        for r in 0..m {
            let cb = self.cost[self.basic[r]];
            if cb != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (pv, &a) in pi.iter_mut().zip(row) {
                    *pv += cb * a;
                }
            }
        }
        for j in 0..n {
            self.d[j] = if self.status[j] == VarStatus::Basic {
                0.0
            } else {
                self.cost[j] - p.dot_col(&pi, j)
            };
        }
    }

    /// `B^-1 a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let p = self.prob;
        let m = p.num_rows;
        let mut w = vec![0.0; m];
        if j < p.num_struct {
            for &(i, a) in &p.cols[j] {
                for (r, wr) in w.iter_mut().enumerate() {
                    *wr += self.binv[r * m + i] * a;
                }
            }
        } else {
            let i = j - p.num_struct;
            for (r, wr) in w.iter_mut().enumerate() {
                *wr = self.binv[r * m + i];
            }
        }
        w
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[f64], leaving_status: VarStatus) -> Result<()> {
        let m = self.prob.num_rows;
        let piv = w[r];
        let leaving = self.basic[r];
        {
            let (before, rest) = self.binv.split_at_mut(r * m);
            let (prow, after) = rest.split_at_mut(m);
            prow.iter_mut().for_each(|v| *v /= piv);
            for (i, chunk) in before.chunks_mut(m).enumerate() {
                let f = w[i];
                if f != 0.0 {
                    chunk.iter_mut().zip(prow.iter()).for_each(|(a, b)| *a -= f * b);
                }
            }
            for (i, chunk) in after.chunks_mut(m).enumerate() {
                let f = w[r + 1 + i];
                if f != 0.0 {
                    chunk.iter_mut().zip(prow.iter()).for_each(|(a, b)| *a -= f * b);
                }
            }
        }
        self.basic[r] = q;
        self.status[q] = VarStatus::Basic;
        self.status[leaving] = leaving_status;
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    fn primal_infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lower[j] - FEAS_TOL {
            self.lower[j] - v
        } else if v > self.upper[j] + FEAS_TOL {
            v - self.upper[j]
        } else {
            0.0
        }
    }

    fn dual_infeasibility(&self, j: usize) -> f64 {
        if self.lower[j] == self.upper[j] {
            return 0.0;
        }
        let d = self.d[j];
        match self.status[j] {
            VarStatus::Basic => 0.0,
            VarStatus::AtLower => (-d).max(0.0),
            VarStatus::AtUpper => d.max(0.0),
            VarStatus::Free => d.abs(),
        }
    }

    /// Flips boxed columns to the bound their reduced cost prefers and zeroes
    /// the reduced cost of the rest by perturbing their cost. Returns whether
    /// any cost was perturbed.
    fn make_dual_feasible(&mut self) -> bool {
        let n = self.prob.num_cols();
        let mut flipped = false;
        for j in 0..n {
            if self.dual_infeasibility(j) <= DUAL_TOL {
                continue;
            }
            let boxed = self.lower[j].is_finite() && self.upper[j].is_finite();
            if boxed && self.status[j] != VarStatus::Free {
                self.status[j] = if self.d[j] < 0.0 {
                    VarStatus::AtUpper
                } else {
                    VarStatus::AtLower
                };
                flipped = true;
            }
        }
        if flipped {
            self.recompute();
        }
        let mut perturbed = false;
        for j in 0..n {
            if self.dual_infeasibility(j) > DUAL_TOL {
                self.cost[j] -= self.d[j];
                self.d[j] = 0.0;
                perturbed = true;
            }
        }
        perturbed
    }

    fn dual_simplex(&mut self) -> Result<LpStatus> {
        let p = self.prob;
        let m = p.num_rows;
        let n = p.num_cols();
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::NumericalFailure("dual simplex iteration limit".into()));
            }
            let bland = degenerate > 10 * m.max(1);
            // Leaving row: largest infeasibility, or smallest column index under Bland.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let j = self.basic[r];
                let inf = self.primal_infeasibility(j);
                if inf <= 0.0 {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((lr, li)) => {
                        if bland {
                            j < self.basic[lr]
                        } else {
                            inf > li
                        }
                    }
                };
                if better {
                    leave = Some((r, inf));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(LpStatus::Optimal);
            };
            let jp = self.basic[r];
            let to_lower = self.x[jp] < self.lower[jp];
            let rho = &self.binv[r * m..(r + 1) * m];

            // Harris two-pass ratio test over eligible nonbasic columns.
            let mut alphas: Vec<(usize, f64)> = Vec::new();
            for j in 0..n {
                let st = self.status[j];
                if st == VarStatus::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = p.dot_col(rho, j);
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let can_inc = matches!(st, VarStatus::AtLower | VarStatus::Free);
                let can_dec = matches!(st, VarStatus::AtUpper | VarStatus::Free);
                let ok = if to_lower {
                    (a < 0.0 && can_inc) || (a > 0.0 && can_dec)
                } else {
                    (a > 0.0 && can_inc) || (a < 0.0 && can_dec)
                };
                if ok {
                    alphas.push((j, a));
                }
            }
            if alphas.is_empty() {
                return Ok(LpStatus::Infeasible);
            }
            let q = if bland {
                let min_ratio = alphas
                    .iter()
                    .map(|&(j, a)| self.d[j].abs() / a.abs())
                    .fold(f64::INFINITY, f64::min);
                alphas
                    .iter()
                    .filter(|&&(j, a)| self.d[j].abs() / a.abs() <= min_ratio + 1e-12)
                    .map(|&(j, _)| j)
                    .min()
                    .unwrap()
            } else {
                let bound = alphas
                    .iter()
                    .map(|&(j, a)| (self.d[j].abs() + DUAL_TOL) / a.abs())
                    .fold(f64::INFINITY, f64::min);
                alphas
                    .iter()
                    .filter(|&&(j, a)| self.d[j].abs() / a.abs() <= bound)
                    .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                    .map(|&(j, _)| j)
                    .unwrap()
            };
            let w = self.ftran(q);
            if w[r].abs() <= PIVOT_TOL {
                self.refactor()?;
                self.recompute();
                self.iterations += 1;
                continue;
            }
            if self.d[q].abs() <= DUAL_TOL {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let leaving_status = if to_lower {
                VarStatus::AtLower
            } else {
                VarStatus::AtUpper
            };
            self.pivot(r, q, &w, leaving_status)?;
            self.iterations += 1;
            self.recompute();
        }
    }

    fn primal_simplex(&mut self) -> Result<LpStatus> {
        let p = self.prob;
        let m = p.num_rows;
        let n = p.num_cols();
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::NumericalFailure("primal simplex iteration limit".into()));
            }
            let bland = degenerate > 10 * m.max(1);
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..n {
                let inf = self.dual_infeasibility(j);
                if inf <= DUAL_TOL {
                    continue;
                }
                if bland {
                    enter = Some((j, inf));
                    break;
                }
                if enter.is_none_or(|(_, best)| inf > best) {
                    enter = Some((j, inf));
                }
            }
            let Some((q, _)) = enter else {
                return Ok(LpStatus::Optimal);
            };
            let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };
            let w = self.ftran(q);

            // Harris ratio test; the entering column's own box is a candidate.
            let own = self.upper[q] - self.lower[q];
            let mut bound = if own.is_finite() { own } else { f64::INFINITY };
            for r in 0..m {
                let rate = -dir * w[r];
                if rate.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.basic[r];
                let lim = if rate < 0.0 {
                    (self.x[j] - self.lower[j] + FEAS_TOL) / -rate
                } else {
                    (self.upper[j] - self.x[j] + FEAS_TOL) / rate
                };
                bound = bound.min(lim);
            }
            if bound == f64::INFINITY {
                return Ok(LpStatus::Unbounded);
            }
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let rate = -dir * w[r];
                if rate.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.basic[r];
                let step = if rate < 0.0 {
                    (self.x[j] - self.lower[j]) / -rate
                } else {
                    (self.upper[j] - self.x[j]) / rate
                };
                if step <= bound {
                    let better = match leave {
                        None => true,
                        Some((lr, la)) => {
                            if bland {
                                j < self.basic[lr]
                            } else {
                                rate.abs() > la
                            }
                        }
                    };
                    if better {
                        leave = Some((r, rate.abs()));
                    }
                }
            }
            self.iterations += 1;
            let row_step = leave.map(|(r, _)| (r, self.ratio_of(r, dir, &w).max(0.0)));
            match row_step {
                Some((r, step)) if !(own.is_finite() && own <= step) => {
                    let rate = -dir * w[r];
                    let leaving_status = if rate < 0.0 {
                        VarStatus::AtLower
                    } else {
                        VarStatus::AtUpper
                    };
                    if step <= FEAS_TOL {
                        degenerate += 1;
                    } else {
                        degenerate = 0;
                    }
                    self.pivot(r, q, &w, leaving_status)?;
                }
                _ => {
                    // Bound flip of the entering column.
                    self.status[q] = if dir > 0.0 {
                        VarStatus::AtUpper
                    } else {
                        VarStatus::AtLower
                    };
                    degenerate = 0;
                }
            }
            self.recompute();
        }
    }

    fn ratio_of(&self, r: usize, dir: f64, w: &[f64]) -> f64 {
        let rate = -dir * w[r];
        let j = self.basic[r];
        if rate < 0.0 {
            (self.x[j] - self.lower[j]) / -rate
        } else {
            (self.upper[j] - self.x[j]) / rate
        }
    }

    /// Solves from the loaded basis (or the slack basis when none is loaded).
    pub fn solve(&mut self) -> Result<LpResult> {
        if !self.has_basis() {
            let b = self.prob.slack_basis();
            self.load_basis(&b);
        }
        self.iterations = 0;
        self.cost.copy_from_slice(&self.prob.cost);
        self.normalize_statuses();
        self.recompute();
        let mut attempts = 0;
        loop {
            match self.solve_phases() {
                Ok(status) => {
                    let objective = (0..self.prob.num_struct).map(|j| self.prob.cost[j] * self.x[j]).sum();
                    return Ok(LpResult {
                        status,
                        objective,
                        values: self.x[..self.prob.num_struct].to_vec(),
                        basis: self.basis(),
                        iterations: self.iterations,
                    });
                }
                Err(e) if attempts == 0 => {
                    // Restart once from the slack basis.
                    let _ = e;
                    attempts += 1;
                    let b = self.prob.slack_basis();
                    self.load_basis(&b);
                    self.cost.copy_from_slice(&self.prob.cost);
                    self.normalize_statuses();
                    self.recompute();
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn solve_phases(&mut self) -> Result<LpStatus> {
        for _ in 0..4 {
            let perturbed = self.make_dual_feasible();
            let st = self.dual_simplex()?;
            if st == LpStatus::Infeasible {
                return Ok(st);
            }
            if perturbed {
                self.cost.copy_from_slice(&self.prob.cost);
                self.recompute();
            }
            let st = self.primal_simplex()?;
            if st == LpStatus::Unbounded {
                return Ok(st);
            }
            // Confirm on a fresh factorization.
            self.refactor()?;
            self.recompute();
            let primal_ok = (0..self.prob.num_cols()).all(|j| self.primal_infeasibility(j) <= 0.0);
            let dual_ok = (0..self.prob.num_cols()).all(|j| self.dual_infeasibility(j) <= DUAL_TOL);
            if primal_ok && dual_ok {
                return Ok(LpStatus::Optimal);
            }
        }
        Err(Error::NumericalFailure("could not reach a stable optimal basis".into()))
    }
}

/// Solves the LP relaxation of `model` with the listed columns fixed.
pub fn solve_lp(model: &MilpModel, fixings: &[(usize, f64)]) -> Result<LpResult> {
    let prob = LpProblem::from_model(model);
    let mut s = LpSolver::new(&prob);
    for &(j, v) in fixings {
        s.set_bounds(j, v, v);
    }
    s.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarKind;

    fn tiny() -> MilpModel {
        // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x, y in [0, 10]
        let mut m = MilpModel::new("tiny");
        let x = m.add_var("x", VarKind::Continuous, 0.0, 10.0);
        let y = m.add_var("y", VarKind::Continuous, 0.0, 10.0);
        m.objective = vec![(x, -1.0), (y, -1.0)];
        m.add_constraint("a", [(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        m.add_constraint("b", [(x, 3.0), (y, 1.0)], Relation::Le, 6.0);
        m
    }

    #[test]
    fn textbook_lp() {
        let r = solve_lp(&tiny(), &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 2.8).abs() < 1e-9);
        assert!((r.values[0] - 1.6).abs() < 1e-9);
        assert!((r.values[1] - 1.2).abs() < 1e-9);
    }

    #[test]
    fn single_bound() {
        let mut m = MilpModel::new("b");
        let l = m.add_var("lambda", VarKind::Continuous, 0.5, f64::INFINITY);
        m.objective = vec![(l, 1.0)];
        let r = solve_lp(&m, &[]).unwrap();
        assert_eq!(r.objective, 0.5);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut m = MilpModel::new("inf");
        let x = m.add_var("x", VarKind::Continuous, 0.0, 1.0);
        m.add_constraint("c", [(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&m, &[]).unwrap().status, LpStatus::Infeasible);

        let mut m = MilpModel::new("unb");
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY);
        let y = m.add_var("y", VarKind::Continuous, 0.0, f64::INFINITY);
        m.objective = vec![(x, -1.0)];
        m.add_constraint("c", [(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&m, &[]).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min 2a + 3b s.t. a + b = 1, a - b >= -0.5
        let mut m = MilpModel::new("eq");
        let a = m.add_var("a", VarKind::Continuous, 0.0, f64::INFINITY);
        let b = m.add_var("b", VarKind::Continuous, 0.0, f64::INFINITY);
        m.objective = vec![(a, 2.0), (b, 3.0)];
        m.add_constraint("s", [(a, 1.0), (b, 1.0)], Relation::Eq, 1.0);
        m.add_constraint("g", [(a, 1.0), (b, -1.0)], Relation::Ge, -0.5);
        let r = solve_lp(&m, &[]).unwrap();
        assert!((r.objective - 2.0).abs() < 1e-12);
        assert!(m.max_violation(&r.values) <= 1e-9);
    }

    #[test]
    fn warm_start_after_bound_change() {
        let m = tiny();
        let prob = LpProblem::from_model(&m);
        let mut s = LpSolver::new(&prob);
        let first = s.solve().unwrap();
        s.set_bounds(0, 0.0, 1.0);
        let second = s.solve().unwrap();
        let cold = solve_lp(
            &{
                let mut m2 = m.clone();
                m2.variables[0].upper = 1.0;
                m2
            },
            &[],
        )
        .unwrap();
        assert!(first.objective < second.objective);
        assert!((second.objective - cold.objective).abs() < 1e-12);
        assert!((second.objective + 2.5).abs() < 1e-9);
    }
}
