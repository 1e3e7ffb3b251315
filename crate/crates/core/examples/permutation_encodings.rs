//! The two permutation encodings side by side: `z_ij = 1` when objective
//! `i` sits at position `j`, and its cumulative form
//! `s_ij = 1 - sum_{k >= j} z_ik`.
//!
//! ```bash
//! cargo run -p owa --example permutation_encodings
//! ```

use owa::formulation::canonical_lift;
use owa::instances::builtin;
use owa::{build, FormulationVariant};

fn main() -> owa::Result<()> {
    let inst = builtin("example1").expect("bundled").instance;
    let x = [1, 0, 1];
    let y = inst.costs.outcome(&x)?;
    println!("x {x:?} outcomes {:?}", y.y.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    let p = inst.p();
    for name in ["Fz", "Fs"] {
        let built = build(FormulationVariant::parse(name)?, &inst, None)?;
        let lift = canonical_lift(&built, &inst, &x)?;
        println!("{name}");
        for i in 0..p {
            let row: Vec<String> = (0..p)
                .map(|j| {
                    let z = built.z_expr(i, j).value(&lift);
                    let s = built.s_expr(i, j).value(&lift);
                    format!("z={z} s={s}")
                })
                .collect();
            println!("  objective {}: {}", i + 1, row.join(" | "));
        }
        println!("  theta {:?}", built.theta_values(&lift));
    }
    Ok(())
}
