//! Mixed-binary linear models and the builders for both reformulations.
//!
//! Column order is fixed: the `x` block, then `s` (or `z`), then `y`, then the
//! level variable `lambda` (or `alpha`). Row order follows the formulation as
//! written, with valid inequalities appended last.

mod lp_format;

pub use lp_format::{export_lp_text, parse_lp_text};

use serde::{Deserialize, Serialize};

use crate::bounds::{lambda_bounds, BigMVector, BoundCertificate};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::instance::StqpInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`, ascending by index, no zeros.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Variable roles, addressed by column index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Roles {
    pub x: Vec<usize>,
    /// `s` in the first formulation, `z` in the second.
    pub slack: Vec<usize>,
    pub y: Vec<usize>,
    /// `lambda` or `alpha`.
    pub level: Option<usize>,
}

/// Minimization model with continuous and binary columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    pub name: String,
    pub variables: Vec<Variable>,
    /// Objective coefficients, ascending by index.
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<Constraint>,
    pub roles: Roles,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
            roles: Roles::default(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> usize {
        let (lower, upper) = match kind {
            VarKind::Binary => (0.0, 1.0),
            VarKind::Continuous => (lower, upper),
        };
        self.variables.push(Variable {
            name: name.into(),
            kind,
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: impl IntoIterator<Item = (usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        let mut coeffs: Vec<(usize, f64)> = coeffs.into_iter().filter(|(_, c)| *c != 0.0).collect();
        coeffs.sort_by_key(|(i, _)| *i);
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn binaries(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&i| self.variables[i].kind == VarKind::Binary)
            .collect()
    }

    /// Objective value of a column vector.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(i, c)| c * values[i]).sum()
    }

    /// Largest violation of any row or column bound.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &x) in self.variables.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(i, a)| a * values[i]).sum();
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formulation {
    Milp1,
    Milp2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundChoice {
    L1,
    L2,
}

/// One of the eight model variants: formulation, bound, valid inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulationConfig {
    pub formulation: Formulation,
    pub bound_kind: BoundChoice,
    pub valid_inequalities: bool,
    /// Replaces the computed big-M constants when set.
    pub big_m_override: Option<Vec<f64>>,
}

impl Default for FormulationConfig {
    fn default() -> Self {
        Self::new(Formulation::Milp1, BoundChoice::L1, false)
    }
}

impl FormulationConfig {
    pub fn new(formulation: Formulation, bound_kind: BoundChoice, valid_inequalities: bool) -> Self {
        Self {
            formulation,
            bound_kind,
            valid_inequalities,
            big_m_override: None,
        }
    }

    /// All eight combinations in table order.
    pub fn all_variants() -> Vec<Self> {
        let mut out = Vec::with_capacity(8);
        for bound in [BoundChoice::L1, BoundChoice::L2] {
            for f in [Formulation::Milp1, Formulation::Milp2] {
                for vi in [false, true] {
                    out.push(Self::new(f, bound, vi));
                }
            }
        }
        out
    }

    /// Label such as `MILP1-L2-VI`.
    pub fn label(&self) -> String {
        let f = match self.formulation {
            Formulation::Milp1 => "MILP1",
            Formulation::Milp2 => "MILP2",
        };
        let b = match self.bound_kind {
            BoundChoice::L1 => "L1",
            BoundChoice::L2 => "L2",
        };
        if self.valid_inequalities {
            format!("{f}-{b}-VI")
        } else {
            format!("{f}-{b}")
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        let parts: Vec<&str> = label.split('-').collect();
        let formulation = match parts.first()?.to_ascii_uppercase().as_str() {
            "MILP1" => Formulation::Milp1,
            "MILP2" => Formulation::Milp2,
            _ => return None,
        };
        let bound_kind = match parts.get(1)?.to_ascii_uppercase().as_str() {
            "L1" => BoundChoice::L1,
            "L2" => BoundChoice::L2,
            _ => return None,
        };
        let valid_inequalities = match parts.get(2) {
            None => false,
            Some(s) if s.eq_ignore_ascii_case("VI") => true,
            Some(_) => return None,
        };
        if parts.len() > 3 {
            return None;
        }
        Some(Self::new(formulation, bound_kind, valid_inequalities))
    }
}

fn check_bound(inst: &StqpInstance, lb: &BoundCertificate, bigm: &BigMVector) -> Result<(f64, f64)> {
    let (lo, hi) = lambda_bounds(inst, lb);
    if lo > hi {
        return Err(Error::InvalidBound {
            bound: lo,
            min_diag: hi,
        });
    }
    if bigm.m.len() != inst.n() {
        return Err(Error::Dimension {
            expected: inst.n(),
            got: bigm.m.len(),
        });
    }
    Ok((lo, hi))
}

/// Shared column layout: `x`, `slack`, `y`, level.
fn columns(model: &mut MilpModel, n: usize, slack: &str, level: &str, lo: f64, hi: f64) {
    let x: Vec<usize> = (0..n)
        .map(|j| model.add_var(format!("x{}", j + 1), VarKind::Continuous, 0.0, 1.0))
        .collect();
    let s: Vec<usize> = (0..n)
        .map(|j| model.add_var(format!("{slack}{}", j + 1), VarKind::Continuous, 0.0, f64::INFINITY))
        .collect();
    let y: Vec<usize> = (0..n)
        .map(|j| model.add_var(format!("y{}", j + 1), VarKind::Binary, 0.0, 1.0))
        .collect();
    let l = model.add_var(level, VarKind::Continuous, lo, hi);
    model.objective = vec![(l, 1.0)];
    model.roles = Roles {
        x,
        slack: s,
        y,
        level: Some(l),
    };
}

/// Rows shared by both formulations: simplex, `x_j <= y_j`, `s_j <= M_j (1 - y_j)`.
fn linking_rows(model: &mut MilpModel, m: &[f64]) {
    let r = model.roles.clone();
    let n = r.x.len();
    model.add_constraint("simplex", r.x.iter().map(|&i| (i, 1.0)), Relation::Eq, 1.0);
    for j in 0..n {
        model.add_constraint(
            format!("link{}", j + 1),
            [(r.x[j], 1.0), (r.y[j], -1.0)],
            Relation::Le,
            0.0,
        );
    }
    for j in 0..n {
        model.add_constraint(
            format!("bigm{}", j + 1),
            [(r.slack[j], 1.0), (r.y[j], m[j])],
            Relation::Le,
            m[j],
        );
    }
}

/// KKT-based model: `Qx - lambda e - s = 0`, complementarity linearized with
/// binaries and big-M constants.
pub fn build_milp1(inst: &StqpInstance, lb: &BoundCertificate, bigm: &BigMVector) -> Result<MilpModel> {
    let (lo, hi) = check_bound(inst, lb, bigm)?;
    let n = inst.n();
    let q = &inst.q;
    let mut model = MilpModel::new(format!("{}-milp1", inst.name));
    columns(&mut model, n, "s", "lambda", lo, hi);
    let r = model.roles.clone();
    let level = r.level.unwrap();
    for j in 0..n {
        let mut row: Vec<(usize, f64)> = (0..n).map(|i| (r.x[i], q.get(j, i))).collect();
        row.push((r.slack[j], -1.0));
        row.push((level, -1.0));
        model.add_constraint(format!("kkt{}", j + 1), row, Relation::Eq, 0.0);
    }
    linking_rows(&mut model, &bigm.m);
    Ok(model)
}

/// Support-max model: `(Qx)_j <= alpha + z_j` with `z_j` released only off the
/// support.
pub fn build_milp2(inst: &StqpInstance, lb: &BoundCertificate, bigm: &BigMVector) -> Result<MilpModel> {
    let (lo, hi) = check_bound(inst, lb, bigm)?;
    let n = inst.n();
    let q = &inst.q;
    let mut model = MilpModel::new(format!("{}-milp2", inst.name));
    columns(&mut model, n, "z", "alpha", lo, hi);
    let r = model.roles.clone();
    let level = r.level.unwrap();
    for j in 0..n {
        let mut row: Vec<(usize, f64)> = (0..n).map(|i| (r.x[i], q.get(j, i))).collect();
        row.push((r.slack[j], -1.0));
        row.push((level, -1.0));
        model.add_constraint(format!("supp{}", j + 1), row, Relation::Le, 0.0);
    }
    linking_rows(&mut model, &bigm.m);
    Ok(model)
}

/// Appends `y_i + y_j <= 1` for each pair.
pub fn add_valid_inequalities(mut model: MilpModel, pairs: &[(usize, usize)]) -> Result<MilpModel> {
    if model.roles.y.is_empty() {
        return Err(Error::UnknownVariable("y"));
    }
    let y = model.roles.y.clone();
    for &(i, j) in pairs {
        if i >= y.len() || j >= y.len() {
            return Err(Error::Dimension {
                expected: y.len(),
                got: i.max(j) + 1,
            });
        }
        model.add_constraint(
            format!("vi{}_{}", i + 1, j + 1),
            [(y[i], 1.0), (y[j], 1.0)],
            Relation::Le,
            1.0,
        );
    }
    Ok(model)
}

/// Maximum stable set as `min -sum y` over edge constraints.
pub fn build_stable_set_ilp(g: &SimpleGraph) -> MilpModel {
    let mut model = MilpModel::new(format!("stable-set-{}", g.n()));
    let y: Vec<usize> = (0..g.n())
        .map(|j| model.add_var(format!("y{}", j + 1), VarKind::Binary, 0.0, 1.0))
        .collect();
    model.objective = y.iter().map(|&i| (i, -1.0)).collect();
    for &(a, b) in g.edges() {
        model.add_constraint(
            format!("e{}_{}", a + 1, b + 1),
            [(y[a], 1.0), (y[b], 1.0)],
            Relation::Le,
            1.0,
        );
    }
    model.roles.y = y;
    model
}

/// Builds the model for a variant, given an already computed bound.
pub fn build_variant(inst: &StqpInstance, cfg: &FormulationConfig, lb: &BoundCertificate) -> Result<MilpModel> {
    let mut bigm = crate::bounds::big_m(inst, lb);
    if let Some(m) = &cfg.big_m_override {
        bigm.m = m.clone();
    }
    let model = match cfg.formulation {
        Formulation::Milp1 => build_milp1(inst, lb, &bigm)?,
        Formulation::Milp2 => build_milp2(inst, lb, &bigm)?,
    };
    if cfg.valid_inequalities {
        let g = crate::graph::build_convexity_graph(inst);
        add_valid_inequalities(model, &crate::graph::valid_inequality_pairs(&g))
    } else {
        Ok(model)
    }
}
