//! Bound tables from enumeration and from the LP relaxation, and how much
//! each cut family lifts the root bound.
//!
//! ```bash
//! cargo run -p owa --example cuts_and_bounds --release
//! ```

use owa::cuts::{build_with_cuts, compute_bounds};
use owa::instances::{generate_grid, GridSpec, ProblemKind};
use owa::owa::Rational;
use owa::solve::root_relaxation;
use owa::{BoundMethod, CutFamily, FormulationVariant};

fn main() -> owa::Result<()> {
    let spec = GridSpec::new(ProblemKind::ShortestPath, 3, 3, Rational::new(4, 5), 1004)?;
    let inst = generate_grid(&spec)?.instance;
    let exact = compute_bounds(&inst, BoundMethod::Enumeration)?;
    let lp = compute_bounds(&inst, BoundMethod::LpRelaxation)?;
    for i in 0..inst.p() {
        println!("objective {}: enum [{}, {}]  lp [{:.2}, {:.2}]", i + 1, exact.l[i], exact.u[i], lp.l[i], lp.u[i]);
    }

    let variant = FormulationVariant::parse("Fzy")?;
    let base = root_relaxation(&build_with_cuts(variant, &inst, None, &[], None)?)?;
    println!("\nroot LP without cuts {base:.3}");
    for family in CutFamily::default_set(variant) {
        let built = build_with_cuts(variant, &inst, None, &[family], Some(&exact))?;
        println!("{:<26} {:>10.3}", family.tag(), root_relaxation(&built)?);
    }
    Ok(())
}
