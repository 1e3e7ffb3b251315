//! Fixing position variables from an incumbent: any `z_ij` whose
//! conditional OWA lower bound exceeds the incumbent is fixed.
//!
//! ```bash
//! cargo run -p owa --example elimination --release
//! ```

use owa::cuts::{apply_fixings, compute_bounds, elimination_tests};
use owa::instances::{generate_grid, GridSpec, ProblemKind};
use owa::owa::Rational;
use owa::solve::{build_model, solve_built, SolveConfig};
use owa::{BoundMethod, FormulationVariant};
use owa_milp::SolveOptions;

fn main() -> owa::Result<()> {
    let spec = GridSpec::new(ProblemKind::ShortestPath, 3, 3, Rational::new(2, 5), 1006)?;
    let inst = generate_grid(&spec)?.instance;
    let built = build_model(&inst, FormulationVariant::parse("Fz")?, &[], &SolveConfig::default())?;
    let plain = solve_built(&inst, &built, &[], &SolveOptions::default())?;
    let incumbent = plain.value.expect("feasible");
    println!("optimum {incumbent} in {} nodes", plain.report.node_count);

    for method in [BoundMethod::Enumeration, BoundMethod::LpRelaxation] {
        let bounds = compute_bounds(&inst, method)?;
        let fixings = elimination_tests(&built, &bounds, Some(incumbent));
        let fixed = solve_built(&inst, &apply_fixings(&built, &fixings), &[], &SolveOptions::default())?;
        println!(
            "{method:?}: {} fixings, optimum {}, {} nodes",
            fixings.len(),
            fixed.value.expect("optimum survives"),
            fixed.report.node_count
        );
    }
    Ok(())
}
