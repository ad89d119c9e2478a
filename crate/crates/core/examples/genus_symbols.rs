use hklattice::genus::{same_genus, GenusSymbol};
use hklattice::standard::standard_lattice;
use hklattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["E8", "K3[3]", "Mukai", "U + A2 + [-4]"] {
        println!("{name:>14}: {}", GenusSymbol::of(&standard_lattice(name)?)?);
    }

    let ns = Lattice::from_i64(&[[4, 2], [2, -2]])?;
    let n = Lattice::from_i64(&[[4, 2, -2], [2, -2, -1], [-2, -1, 2]])?;
    println!("{:>14}: {}", "NS", GenusSymbol::of(&ns)?);
    println!("{:>14}: {}", "N", GenusSymbol::of(&n)?);

    let a = Lattice::from_i64(&[[6, 0], [0, 70]])?;
    let b = Lattice::from_i64(&[[10, 0], [0, 42]])?;
    println!("diag(6,70) ~ diag(10,42): {}", same_genus(&a, &b)?);

    for text in ["II_(1,21)4^1_1 3^1 5^1 7^1", "II_(0,20)4^2_2 7^1"] {
        let g = GenusSymbol::parse(text)?;
        let verdict = match g.check_consistency() {
            Ok(()) => "consistent".to_string(),
            Err(why) => format!("inconsistent ({why})"),
        };
        println!("{g}: rank {}, det {}, {verdict}", g.rank(), g.det());
    }
    Ok(())
}
