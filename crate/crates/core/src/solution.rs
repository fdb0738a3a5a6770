use serde::{Deserialize, Serialize};

use crate::instance::SimplexVector;
use crate::kkt::KktCertificate;
use crate::SUPPORT_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    TimeLimit,
    InfeasibleModel,
    Error,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "Optimal",
            Status::TimeLimit => "TimeLimit",
            Status::InfeasibleModel => "InfeasibleModel",
            Status::Error => "Error",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_count: u64,
    pub wall_s: f64,
}

/// Relative optimality gap `|bound - value| / (1e-10 + |value|)`.
pub fn relative_gap(best_bound: f64, best_solution: f64) -> f64 {
    (best_bound - best_solution).abs() / (1e-10 + best_solution.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StqpSolution {
    pub x: SimplexVector,
    pub value: f64,
    pub support: Vec<usize>,
    pub certificate: Option<KktCertificate>,
    pub status: Status,
    pub best_bound: f64,
    pub gap: f64,
    pub stats: SolveStats,
}

impl StqpSolution {
    pub fn new(
        x: SimplexVector,
        value: f64,
        certificate: Option<KktCertificate>,
        status: Status,
        best_bound: f64,
        stats: SolveStats,
    ) -> Self {
        let support = x.support(SUPPORT_THRESHOLD);
        Self {
            x,
            value,
            support,
            certificate,
            status,
            best_bound,
            gap: relative_gap(best_bound, value),
            stats,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_arithmetic() {
        assert!((relative_gap(0.99, 1.0) - 0.01).abs() < 1e-9);
        assert_eq!(relative_gap(0.5, 0.5), 0.0);
    }
}
