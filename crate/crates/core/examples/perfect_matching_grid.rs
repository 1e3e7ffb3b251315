//! Perfect matching on the 3x3 grid with its last vertex removed.
//!
//! ```bash
//! cargo run -p owa --example perfect_matching_grid --release
//! ```

use owa::instances::{generate_grid, GridSpec, ProblemKind};
use owa::oracle::brute_force_optimum;
use owa::owa::Rational;
use owa::solve::{solve, SolveConfig};
use owa::FormulationVariant;

fn main() -> owa::Result<()> {
    let spec = GridSpec::new(ProblemKind::PerfectMatching, 3, 2, Rational::new(4, 5), 5000)?;
    let file = generate_grid(&spec)?;
    let graph = file.instance.domain.graph().expect("graph domain").clone();
    let out = solve(&file.instance, FormulationVariant::parse("Fs")?, &[], &SolveConfig::default())?;
    let x = out.x.expect("feasible");
    let matched: Vec<_> = graph.edges().iter().zip(&x).filter(|(_, &b)| b == 1).map(|(e, _)| *e).collect();
    println!("{} matching {matched:?}", file.name);
    println!("owa {} (oracle {})", out.value.unwrap(), brute_force_optimum(&file.instance)?.value);
    println!("root LP {:?}, gap_LR {:?}", out.report.root_lp_value, out.report.gap_lr);
    Ok(())
}
