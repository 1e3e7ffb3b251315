//! Ordered weighted average (OWA) combinatorial optimization.
//!
//! Minimizes `omega . sort_desc(C x)` over a binary domain `Q` with a
//! catalog of mixed-integer formulations, valid inequalities and an
//! exhaustive oracle to check them against.

pub mod bench;
pub mod cuts;
pub mod domain;
pub mod error;
pub mod formulation;
pub mod instances;
pub mod oracle;
pub mod owa;
pub mod solve;

pub use cuts::{BoundMethod, BoundTable, CutFamily, SubsetMode};
pub use domain::{DomainKind, DomainSpec, Graph};
pub use error::{OwaError, Result};
pub use formulation::{build, BuiltModel, Family, Flavor, FormulationVariant, OwaInstance};
pub use owa::{evaluate_owa, CostMatrix, Permutation, Rational, WeightVector};
