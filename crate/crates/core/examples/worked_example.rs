//! Three items, pick two, three cost functions: enumerate every choice,
//! then let the MILP find the same optimum.
//!
//! ```bash
//! cargo run -p owa --example worked_example
//! ```

use owa::domain::explicit_cardinality_domain;
use owa::oracle::brute_force_optimum;
use owa::solve::{render_report, solve, SolveConfig};
use owa::{CostMatrix, FormulationVariant, OwaInstance, WeightVector};

fn main() -> owa::Result<()> {
    let inst = OwaInstance::new(
        explicit_cardinality_domain(3, 2)?,
        CostMatrix::from_integers(&[vec![1, 4, 1], vec![1, 1, 3], vec![5, 1, 2]])?,
        // Heavier weight on the worst outcome.
        WeightVector::from_integers(&[4, 2, 1])?,
    )?;

    let oracle = brute_force_optimum(&inst)?;
    println!("x | y | sorted y | sigma | value");
    print!("{}", oracle.render());

    let out = solve(&inst, FormulationVariant::parse("Fz")?, &[], &SolveConfig::default())?;
    println!();
    print!("{}", render_report(&out, false));
    assert_eq!(out.value, Some(oracle.value));
    Ok(())
}
