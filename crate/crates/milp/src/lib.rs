//! A small, deterministic mixed-integer linear programming engine.
//!
//! The engine is intended for desk-scale models (tens to a few hundred
//! variables) where exactness of the search and reproducibility matter more
//! than raw speed:
//!
//! * [`simplex`] solves LP relaxations with a dense bounded-variable primal
//!   simplex (two phases).
//! * [`bnb`] runs best-bound branch-and-bound over the binary columns.
//! * [`export`] writes fixed-format MPS and CPLEX-style LP text so the same
//!   model can be handed to an external solver.
//!
//! ```
//! use owa_milp::{Model, Sense, VarKind, branch_and_bound, SolveOptions, SolveStatus};
//!
//! let mut m = Model::new("knap");
//! let a = m.add_var("a", VarKind::Binary, 0.0, 1.0);
//! let b = m.add_var("b", VarKind::Binary, 0.0, 1.0);
//! m.set_objective(a, -3.0);
//! m.set_objective(b, -2.0);
//! m.add_row(vec![(a, 2.0), (b, 2.0)], Sense::Le, 3.0, "cap");
//! let report = branch_and_bound(&m, &SolveOptions::default());
//! assert_eq!(report.status, SolveStatus::Optimal);
//! assert!((report.objective.unwrap() + 3.0).abs() < 1e-9);
//! ```

pub mod bnb;
pub mod export;
pub mod model;
pub mod simplex;

pub use bnb::{
    branch_and_bound, branch_and_bound_observed, NodeEvent, NodeOutcome, SolveOptions, SolveReport, SolveStatus,
};
pub use export::{write_lp, write_mps};
pub use model::{Model, Row, Sense, VarKind, Variable};
pub use simplex::{solve_lp, solve_lp_with_bounds, LpSolution, LpStatus, Tolerances};
