//! Exact solution of StQP models by LP-based branch-and-bound.

mod bnb;
mod heuristic;
pub mod simplex;

pub use bnb::{
    branch_select, solve_mip, BnbNode, BranchChoice, Branching, HeuristicFn, Incumbent, MipOutcome, NodeSelection,
    SolverConfig, INTEGRALITY_TOL,
};
pub use heuristic::{incumbent_heuristic, HeuristicPoint, StqpView, HEURISTIC_SUPPORT};
pub use simplex::{solve_lp, Basis, LpProblem, LpResult, LpSolver, LpStatus};

use std::time::Instant;

use crate::bounds::{lb1, lb2, BoundCertificate, SplittingConfig};
use crate::error::{Error, Result};
use crate::instance::{preprocess_trivial, SimplexVector, StqpInstance};
use crate::kkt::{kkt_check, solve_face};
use crate::milp::{build_variant, BoundChoice, FormulationConfig, MilpModel};
use crate::solution::{Status, StqpSolution};
use crate::{SUPPORT_THRESHOLD, TOL_KKT};

/// Solves a model built by [`crate::milp::build_milp1`] or
/// [`crate::milp::build_milp2`] and returns the simplex point it encodes.
pub fn solve_milp(model: &MilpModel, cfg: &SolverConfig) -> Result<StqpSolution> {
    let view = StqpView::from_model(model)
        .ok_or_else(|| Error::InvalidParameter(format!("model {} does not encode an StQP", model.name)))?;
    let n = view.n();
    let nv = model.num_vars();
    let diag = view.q.diag();
    let k = (0..n).fold(0, |k, j| if diag[j] < diag[k] { j } else { k });
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    let initial = Incumbent {
        value: diag[k],
        values: view.columns(&e, diag[k], nv),
    };
    let hook = |values: &[f64]| -> Option<Incumbent> {
        let p = view.point_from_x(&view.x_of(values));
        Some(Incumbent {
            value: p.value,
            values: view.columns(&p.x, p.value, nv),
        })
    };
    let out = solve_mip(model, cfg, Some(initial), Some(&hook))?;
    let Some(inc) = out.incumbent else {
        return Ok(StqpSolution::new(
            SimplexVector::barycenter(n),
            f64::NAN,
            None,
            Status::InfeasibleModel,
            out.best_bound,
            out.stats,
        ));
    };
    let x = polish(&view, &view.x_of(&inc.values));
    let value = view.q.quad_form(&x);
    let inst = StqpInstance::new(model.name.clone(), view.q.clone(), crate::instance::Origin::File)?;
    let x = SimplexVector::normalized(x);
    let cert = kkt_check(&inst, &x, TOL_KKT).ok();
    // The level column's lower bound is itself a valid bound on the optimum.
    let floor = view.roles.level.map_or(f64::NEG_INFINITY, |l| model.variables[l].lower);
    Ok(StqpSolution::new(
        x,
        value,
        cert,
        out.status,
        out.best_bound.max(floor).min(value),
        out.stats,
    ))
}

/// Removes support pairs with a nonpositive convexity discriminant (the
/// objective is concave along `e_i - e_j`, so an endpoint is no worse), then
/// re-solves the face and keeps whichever point is better.
fn polish(view: &StqpView, x: &[f64]) -> Vec<f64> {
    let n = view.n();
    let q = &view.q;
    let mut best = normalize_clip(x);
    let mut best_val = q.quad_form(&best);
    loop {
        let support: Vec<usize> = (0..n).filter(|&j| best[j] > SUPPORT_THRESHOLD).collect();
        let pair = support.iter().enumerate().find_map(|(a, &i)| {
            support[a + 1..]
                .iter()
                .find(|&&j| crate::graph::convexity_discriminant(q, i, j) <= 0.0)
                .map(|&j| (i, j))
        });
        let Some((i, j)) = pair else { break };
        let mut to_i = best.clone();
        to_i[i] += to_i[j];
        to_i[j] = 0.0;
        let mut to_j = best.clone();
        to_j[j] += to_j[i];
        to_j[i] = 0.0;
        let (vi, vj) = (q.quad_form(&to_i), q.quad_form(&to_j));
        let (cand, v) = if vi <= vj { (to_i, vi) } else { (to_j, vj) };
        if v > best_val + 1e-12 * (1.0 + best_val.abs()) {
            break;
        }
        best = cand;
        best_val = v.min(best_val);
    }
    let support: Vec<usize> = (0..n).filter(|&j| best[j] > SUPPORT_THRESHOLD).collect();
    if let Some(face) = solve_face(q, &support) {
        if face.u.iter().all(|&u| u >= -1e-12) {
            let cand = normalize_clip(&crate::kkt::lift(n, &support, &face.u));
            if q.quad_form(&cand) <= best_val {
                best = cand;
            }
        }
    }
    best
}

fn normalize_clip(x: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = x
        .iter()
        .map(|a| if *a > SUPPORT_THRESHOLD { *a } else { 0.0 })
        .collect();
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|a| *a /= s);
    }
    v
}

/// One variant solve with the bound computation kept apart.
#[derive(Debug, Clone)]
pub struct VariantRun {
    pub solution: StqpSolution,
    /// `None` when preprocessing solved the instance.
    pub bound: Option<BoundCertificate>,
    pub bound_s: f64,
}

/// Computes the bound a variant asks for.
pub fn variant_bound(inst: &StqpInstance, bound: BoundChoice) -> Result<BoundCertificate> {
    match bound {
        BoundChoice::L1 => Ok(lb1(inst)),
        BoundChoice::L2 => lb2(inst, &SplittingConfig::default()),
    }
}

/// Preprocess, bound, build, solve.
pub fn run_variant(inst: &StqpInstance, fcfg: &FormulationConfig, scfg: &SolverConfig) -> Result<VariantRun> {
    if let Some(solution) = preprocess_trivial(inst) {
        return Ok(VariantRun {
            solution,
            bound: None,
            bound_s: 0.0,
        });
    }
    let t = Instant::now();
    let lb = variant_bound(inst, fcfg.bound_kind)?;
    let bound_s = t.elapsed().as_secs_f64();
    let model = build_variant(inst, fcfg, &lb)?;
    let solution = solve_milp(&model, scfg)?;
    Ok(VariantRun {
        solution,
        bound: Some(lb),
        bound_s,
    })
}

pub fn solve_variant(inst: &StqpInstance, fcfg: &FormulationConfig, scfg: &SolverConfig) -> Result<StqpSolution> {
    run_variant(inst, fcfg, scfg).map(|r| r.solution)
}
