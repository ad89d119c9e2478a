use hklattice::hk::twisted_moduli_obstruction;
use hklattice::padic::{hasse_invariant, is_isotropic, relevant_places};
use hklattice::lattice::rational_diagonal;
use hklattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = Lattice::from_i64(&[[4, 2, -2], [2, -2, -1], [-2, -1, 2]])?;
    let diag = rational_diagonal(n.gram());
    for place in relevant_places(&n)? {
        println!(
            "{place}: {}, Hasse invariant {}",
            if is_isotropic(&n, place) { "isotropic" } else { "anisotropic" },
            hasse_invariant(&diag, place)
        );
    }
    println!("N cannot contain U(k): {}", twisted_moduli_obstruction(&n)?);
    let u2 = Lattice::from_i64(&[[0, 2, 0], [2, 0, 0], [0, 0, -4]])?;
    println!("U(2) + [-4] cannot contain U(k): {}", twisted_moduli_obstruction(&u2)?);
    Ok(())
}
