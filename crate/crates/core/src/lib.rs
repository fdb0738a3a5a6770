//! Standard quadratic optimization: minimize `x'Qx` over the unit simplex,
//! solved to global optimality through mixed-binary linear reformulations.
//!
//! ```
//! use stqp::{matrix::SymmetricMatrix, instance::{Origin, StqpInstance}};
//! use stqp::milp::FormulationConfig;
//! use stqp::solver::{solve_variant, SolverConfig};
//!
//! let q = SymmetricMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
//! let inst = StqpInstance::new("demo", q, Origin::File).unwrap();
//! let sol = solve_variant(&inst, &FormulationConfig::default(), &SolverConfig::default()).unwrap();
//! assert!((sol.value - 1.0).abs() < 1e-9);
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bounds;
pub mod error;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod io;
pub mod kkt;
pub mod matrix;
pub mod milp;
pub mod oracle;
pub mod solution;
pub mod solver;

pub use error::{Error, Result};
pub use instance::{SimplexVector, StqpInstance};
pub use matrix::SymmetricMatrix;
pub use solution::{Status, StqpSolution};

/// Primal feasibility tolerance for simplex membership.
pub const TOL_FEAS: f64 = 1e-8;
/// Tolerance on KKT residuals.
pub const TOL_KKT: f64 = 1e-6;
/// Entries above this count as part of the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/optimality.md")]
    mod optimality {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/formulations.md")]
    mod formulations {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/stable_sets.md")]
    mod stable_sets {}
    #[doc = include_str!("../../../book/src/benchmarking.md")]
    mod benchmarking {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
