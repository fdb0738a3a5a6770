//! Exact global minimum by enumerating candidate supports.
//!
//! Every global minimizer is a KKT point, and some global minimizer has a
//! support that is a clique of the convexity graph. Solving the face KKT system
//! on every clique therefore finds the optimal value exactly. The cost grows
//! with the number of cliques, so this is a test oracle for small instances.

use std::time::Instant;

use crate::error::Result;
use crate::graph::build_convexity_graph;
use crate::instance::{SimplexVector, StqpInstance};
use crate::kkt::{kkt_check, lift, solve_face};
use crate::solution::{SolveStats, Status, StqpSolution};
use crate::TOL_KKT;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Largest support size considered.
    pub max_support: usize,
    /// Maximum number of cliques visited before giving up.
    pub clique_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_support: usize::MAX,
            clique_cap: 1_000_000,
        }
    }
}

/// Face weights below this are treated as infeasible.
const NONNEG_TOL: f64 = 1e-10;

pub fn oracle_solve(inst: &StqpInstance, cfg: OracleConfig) -> Result<StqpSolution> {
    let start = Instant::now();
    let n = inst.n();
    let q = &inst.q;
    let g = build_convexity_graph(inst);

    let mut best_value = f64::INFINITY;
    let mut best_x: Vec<f64> = Vec::new();
    let mut solved = 0u64;
    let visited = g.graph.for_each_clique(cfg.max_support, cfg.clique_cap, |clique| {
        let Some(face) = solve_face(q, clique) else {
            return;
        };
        solved += 1;
        if face.u.iter().any(|&u| u < -NONNEG_TOL) {
            return;
        }
        let x = SimplexVector::normalized(lift(n, clique, &face.u)).into_inner();
        let value = q.quad_form(&x);
        if value < best_value {
            best_value = value;
            best_x = x;
        }
    })?;

    // Singletons are cliques, so the loop above always produced a candidate.
    let x = SimplexVector::normalized(best_x);
    let cert = kkt_check(inst, &x, TOL_KKT).ok();
    Ok(StqpSolution::new(
        x,
        best_value,
        cert,
        Status::Optimal,
        best_value,
        SolveStats {
            nodes: visited as u64,
            lp_count: solved,
            wall_s: start.elapsed().as_secs_f64(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{motzkin_straus, SimpleGraph};
    use crate::instance::Origin;
    use crate::matrix::SymmetricMatrix;

    fn inst(q: SymmetricMatrix) -> StqpInstance {
        StqpInstance::new("t", q, Origin::Generated).unwrap()
    }

    #[test]
    fn identity_two() {
        let s = oracle_solve(&inst(SymmetricMatrix::identity(2)), OracleConfig::default()).unwrap();
        assert!((s.value - 0.5).abs() < 1e-15);
        assert_eq!(s.x.as_slice(), &[0.5, 0.5]);
        assert!(s.certificate.unwrap().is_valid(1e-9));
    }

    #[test]
    fn diagonal_two() {
        let s = oracle_solve(&inst(SymmetricMatrix::diagonal(&[2.0, 3.0])), OracleConfig::default()).unwrap();
        assert!((s.value - 1.2).abs() < 1e-14);
        assert!((s.x.as_slice()[0] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn all_ones() {
        let s = oracle_solve(&inst(SymmetricMatrix::ones(3)), OracleConfig::default()).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.support, vec![0]);
    }

    #[test]
    fn petersen_stability() {
        let s = oracle_solve(&motzkin_straus(&SimpleGraph::petersen()), OracleConfig::default()).unwrap();
        assert!((s.value - 0.25).abs() < 1e-12);
        assert_eq!(s.support.len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = OracleConfig {
            clique_cap: 3,
            ..Default::default()
        };
        assert!(oracle_solve(&inst(SymmetricMatrix::identity(4)), cfg).is_err());
    }

    #[test]
    fn beats_dense_grid_search() {
        // Independent check: a fine grid over the 2-simplex never beats the oracle.
        let q =
            SymmetricMatrix::from_rows(&[vec![0.3, -0.8, 0.4], vec![-0.8, 0.1, -0.2], vec![0.4, -0.2, -0.5]]).unwrap();
        let s = oracle_solve(&inst(q.clone()), OracleConfig::default()).unwrap();
        let steps = 400;
        let mut grid_min = f64::INFINITY;
        for a in 0..=steps {
            for b in 0..=steps - a {
                let x = [
                    a as f64 / steps as f64,
                    b as f64 / steps as f64,
                    (steps - a - b) as f64 / steps as f64,
                ];
                grid_min = grid_min.min(q.quad_form(&x));
            }
        }
        assert!(s.value <= grid_min + 1e-12);
        assert!(grid_min - s.value < 1e-4);
    }
}
