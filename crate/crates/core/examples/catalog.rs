//! Every formulation variant on the same instance: model size, root LP
//! bound and the optimum found.
//!
//! ```bash
//! cargo run -p owa --example catalog --release
//! ```

use owa::instances::{generate_grid, GridSpec, ProblemKind};
use owa::owa::Rational;
use owa::solve::{build_model, root_relaxation, solve_built, SolveConfig};
use owa::FormulationVariant;
use owa_milp::SolveOptions;

fn main() -> owa::Result<()> {
    let spec = GridSpec::new(ProblemKind::ShortestPath, 3, 3, Rational::new(3, 5), 1000)?;
    let inst = generate_grid(&spec)?.instance;
    println!("{:<14} {:>5} {:>5} {:>10} {:>8} {:>6}", "variant", "rows", "cols", "root", "optimum", "nodes");
    for variant in FormulationVariant::catalog() {
        let built = build_model(&inst, variant, &[], &SolveConfig::default())?;
        let root = root_relaxation(&built)?;
        let out = solve_built(&inst, &built, &[], &SolveOptions::default())?;
        println!(
            "{:<14} {:>5} {:>5} {:>10.3} {:>8} {:>6}",
            variant.name(),
            built.model.rows.len(),
            built.model.num_vars(),
            root,
            out.value.map_or("-".into(), |v| v.to_string()),
            out.report.node_count
        );
    }
    Ok(())
}
