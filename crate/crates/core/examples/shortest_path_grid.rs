//! A multiobjective shortest path on a 4x4 grid with Hurwicz weights.
//!
//! ```bash
//! cargo run -p owa --example shortest_path_grid --release
//! ```

use owa::instances::{generate_grid, GridSpec, ProblemKind};
use owa::owa::Rational;
use owa::solve::{solve, SolveConfig};
use owa::{CutFamily, FormulationVariant};

fn main() -> owa::Result<()> {
    let spec = GridSpec::new(ProblemKind::ShortestPath, 4, 3, Rational::new(3, 5), 7)?;
    let file = generate_grid(&spec)?;
    let variant = FormulationVariant::parse("FzyR2")?;
    let out = solve(&file.instance, variant, &CutFamily::default_set(variant), &SolveConfig::default())?;
    println!("{}: {}", file.name, out.report.status.as_str());
    println!("path {:?}", out.path.unwrap_or_default());
    println!("sorted costs {:?}", out.sorted_theta.unwrap_or_default());
    println!("owa {}", out.value.map_or("-".into(), |v| v.to_string()));
    Ok(())
}
