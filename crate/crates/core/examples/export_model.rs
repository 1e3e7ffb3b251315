//! Write a model in MPS and LP format for an external solver.
//!
//! ```bash
//! cargo run -p owa --example export_model -- /tmp/owa-model
//! ```

use owa::instances::builtin;
use owa::solve::{build_model, SolveConfig};
use owa::{CutFamily, FormulationVariant};
use owa_milp::{write_lp, write_mps};

fn main() -> owa::Result<()> {
    let stem = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("owa-model").display().to_string());
    let inst = builtin("example1").expect("bundled").instance;
    let variant = FormulationVariant::parse("Fzy")?;
    let built = build_model(&inst, variant, &[CutFamily::Owa2Eq, CutFamily::ValidOrdering], &SolveConfig::default())?;
    std::fs::write(format!("{stem}.mps"), write_mps(&built.model))?;
    std::fs::write(format!("{stem}.lp"), write_lp(&built.model))?;
    println!("wrote {stem}.mps and {stem}.lp ({} rows, big-M {})", built.model.rows.len(), built.big_m);
    Ok(())
}
