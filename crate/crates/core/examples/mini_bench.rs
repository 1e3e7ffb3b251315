//! A small slice of the experiment matrix, printed as CSV.
//!
//! ```bash
//! cargo run -p owa --example mini_bench --release
//! ```

use owa::bench::{run_bench, to_csv, BenchConfig};
use owa::instances::ProblemKind;
use owa::owa::Rational;
use owa::FormulationVariant;

fn main() -> owa::Result<()> {
    let cfg = BenchConfig {
        problems: vec![ProblemKind::ShortestPath, ProblemKind::PerfectMatching],
        sides: vec![3],
        ps: vec![2, 3],
        alphas: vec![Rational::new(2, 5), Rational::new(4, 5)],
        seeds: 3,
        base_seed: 1000,
        variants: ["Fz", "Fzy", "Fs", "FzyR2"]
            .iter()
            .map(|v| FormulationVariant::parse(v))
            .collect::<Result<_, _>>()?,
        time_limit: 60.0,
        ..Default::default()
    };
    let rows = run_bench(&cfg, &|msg| eprintln!("warning: {msg}"))?;
    print!("{}", to_csv(&rows));
    Ok(())
}
