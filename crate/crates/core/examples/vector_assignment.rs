//! Vector assignment ordered median: each customer splits its demand over
//! its nearest open facilities by level, and the OWA acts on the
//! per-customer weighted distances.
//!
//! ```bash
//! cargo run -p owa --example vector_assignment
//! ```

use owa::instances::builtin;
use owa::oracle::brute_force_optimum;
use owa::owa::{rat, vaom_as_owa, vaom_index, Rational};

fn main() -> owa::Result<()> {
    let d: Vec<Vec<Rational>> = [[0, 2, 6], [2, 0, 4], [8, 4, 0]].map(|r| r.map(rat).to_vec()).to_vec();
    let half = Rational::new(1, 2);
    let gamma = vec![vec![half, half], vec![half, half], vec![rat(1), rat(0)]];
    let m = vaom_as_owa(&d, &gamma, &[rat(1); 3])?;
    println!("{} objectives over {} assignment variables", m.costs.p(), m.costs.n());
    for w in &m.warnings {
        println!("warning: {w}");
    }
    // Customer 2 served by facility 3 at level 1.
    let k = vaom_index(3, 2, 1, 2, 0);
    println!("coefficient of x[2,3,1] in objective 2: {}", m.costs.row(1)[k]);

    // The bundled instance restricts the assignments to three feasible ones.
    let inst = builtin("example3").expect("bundled").instance;
    print!("{}", brute_force_optimum(&inst)?.render());
    Ok(())
}
