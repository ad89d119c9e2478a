use hklattice::embed::EmbedOptions;
use hklattice::hk::{classify_leech_pair, k3n_lattice, LeechPairInput, WallSpec};
use hklattice::isom::stable_automorphism_group;
use hklattice::standard::standard_lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["A2", "A1 + A1", "[-4]"] {
        let c = standard_lattice(name)?;
        let group = stable_automorphism_group(&c, &Default::default())?;
        let input = match LeechPairInput::new(c, group.generators().to_vec(), name) {
            Ok(input) => input,
            Err(e) => {
                println!("{name}: not a coinvariant pair ({e})");
                continue;
            }
        };
        let results = classify_leech_pair(&input, &k3n_lattice(3)?, &WallSpec::k3n3(), &EmbedOptions::default())?;
        println!("{name}: {} embedding orbit(s)", results.len());
        for r in &results {
            println!(
                "  {:?}, glue {}: pex-free {}, wall-free {}, |O#(C)| = {}, certified {}",
                r.embedding.guarantee,
                r.embedding.glue_order,
                r.pex.free,
                r.wall.free,
                r.extended_order,
                r.stable_certificate
            );
            if let Some((v, t)) = &r.pex.witness {
                println!("    witness of type {t}: {v:?}");
            }
        }
    }
    Ok(())
}
