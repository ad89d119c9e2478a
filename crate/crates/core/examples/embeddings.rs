use hklattice::embed::{primitive_embeddings, EmbedOptions};
use hklattice::standard::standard_lattice;
use hklattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = EmbedOptions::default();
    let ns = Lattice::from_i64(&[[4, 2], [2, -2]])?;
    let cases = [
        ("[-2]", standard_lattice("[-2]")?, "U"),
        ("[-2]", standard_lattice("[-2]")?, "E8"),
        ("A2", standard_lattice("A2")?, "E8"),
        ("NS", ns, "K3[3]"),
    ];
    for (mname, m, lname) in cases {
        let l = standard_lattice(lname)?;
        let found = primitive_embeddings(&m, &l, &opts)?;
        println!("{mname} into {lname}: {} orbit(s)", found.len());
        for e in &found {
            let k = e.complement.as_lattice()?;
            println!(
                "  {:?}: glue order {}, complement rank {} signature {:?} det {}",
                e.guarantee,
                e.glue_order,
                k.rank(),
                k.signature(),
                k.det()
            );
        }
    }
    Ok(())
}
