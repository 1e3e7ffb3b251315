//! An ordered median problem is an OWA problem with a diagonal cost matrix:
//! each chosen site contributes its own cost and the weights act on the
//! sorted costs.
//!
//! ```bash
//! cargo run -p owa --example ordered_median
//! ```

use owa::domain::explicit_cardinality_domain;
use owa::oracle::brute_force_optimum;
use owa::owa::{om_as_owa, rat};
use owa::solve::{solve, SolveConfig};
use owa::{FormulationVariant, OwaInstance, WeightVector};

fn main() -> owa::Result<()> {
    let d = [rat(5), rat(1), rat(2), rat(7)];
    let costs = om_as_owa(&d)?;
    // Pick two of four sites. Weights (1, 0, 0, 0) give the minimax choice,
    // (1, 1, 1, 1) the minisum one.
    for omega in [[1, 0, 0, 0], [1, 1, 1, 1], [0, 0, 1, 1]] {
        let inst =
            OwaInstance::new(explicit_cardinality_domain(4, 2)?, costs.clone(), WeightVector::from_integers(&omega)?)?;
        let oracle = brute_force_optimum(&inst)?;
        let out = solve(&inst, FormulationVariant::parse("FzyR2")?, &[], &SolveConfig::default())?;
        println!("omega {omega:?}: x {:?} value {} (oracle {})", out.x.unwrap(), out.value.unwrap(), oracle.value);
    }
    Ok(())
}
