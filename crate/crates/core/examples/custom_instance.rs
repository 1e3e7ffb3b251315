//! Build an instance on your own graph and save it in the text format the
//! command line tool reads.
//!
//! ```bash
//! cargo run -p owa --example custom_instance
//! owa solve --instance /tmp/diamond.owa --variant Fzy
//! ```

use owa::domain::shortest_path_domain;
use owa::instances::{write_instance, write_instance_file, InstanceFile};
use owa::oracle::brute_force_optimum;
use owa::{CostMatrix, Graph, OwaInstance, WeightVector};

fn main() -> owa::Result<()> {
    // 1 -> {2, 3} -> 4 plus a chord 2-3.
    let g = Graph::new(4, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])?;
    let inst = OwaInstance::new(
        shortest_path_domain(&g, 1, 4)?,
        CostMatrix::from_integers(&[vec![1, 6, 1, 6, 1], vec![6, 1, 1, 1, 6]])?,
        WeightVector::from_integers(&[2, 1])?,
    )?;
    let file =
        InstanceFile { name: "diamond".into(), instance: inst, provenance: vec![("source".into(), "example".into())] };
    print!("{}", write_instance(&file));
    let path = std::env::temp_dir().join("diamond.owa");
    write_instance_file(&file, &path)?;
    println!("# saved to {}", path.display());
    print!("{}", brute_force_optimum(&file.instance)?.render());
    Ok(())
}
