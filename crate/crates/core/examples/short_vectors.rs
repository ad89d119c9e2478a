use hklattice::shortvec::{short_vectors, short_vectors_all};
use hklattice::standard::standard_lattice;
use hklattice::Int;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, bound) in [("A2", 2), ("D4", 2), ("E8", 2), ("E8", 4), ("A2 + [-4]", 4)] {
        let l = standard_lattice(name)?;
        let all = short_vectors_all(&l, &Int::from(bound))?;
        println!("{name}: {} vectors with |v^2| <= {bound}", all.len());
    }
    let a2 = standard_lattice("A2")?;
    for v in short_vectors(&a2, &Int::from(2))? {
        println!("  A2 root {v:?}, square {}", a2.square(&v));
    }
    Ok(())
}
