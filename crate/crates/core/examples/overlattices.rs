use hklattice::embed::even_overlattices;
use hklattice::genus::same_genus;
use hklattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ns = Lattice::from_i64(&[[4, 2], [2, -2]])?;
    for gram in [[[4, 0], [0, -12]], [[4, 2], [2, -2]], [[2, 0], [0, -2]]] {
        let l = Lattice::from_i64(&gram)?;
        println!("overlattices of {gram:?}:");
        for o in even_overlattices(&l, 1 << 16)? {
            println!(
                "  index {} gram {:?} in the genus of NS: {}",
                o.index,
                o.lattice.gram(),
                same_genus(&o.lattice, &ns)?
            );
        }
    }
    Ok(())
}
