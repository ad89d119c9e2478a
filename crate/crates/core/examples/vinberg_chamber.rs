use hklattice::isom::reflection;
use hklattice::matrix::ivec;
use hklattice::vinberg::{check_relation, fundamental_chamber, reflection_word_scan, wall_orthogonals, VinbergOptions};
use hklattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ns = Lattice::from_i64(&[[4, 2], [2, -2]])?;
    let c = fundamental_chamber(&ns, &[1, 0], &[-2], &VinbergOptions::default())?;
    println!("walls: {:?}", c.walls);
    for w in wall_orthogonals(&c)? {
        println!("wall orthogonal {w:?} of square {}", ns.square(&w));
    }

    let d = ivec(&[-1, 2]);
    let t = |v: &[i64]| reflection(&ivec(v), &ns);
    let (tp, td, tm) = (t(&[0, 1])?, t(&[-1, 2])?, t(&[1, -1])?);
    println!("relation holds: {}", check_relation(&[tp, td.clone()], &[td, tm]));

    let scan = reflection_word_scan(&c, &[d], 6)?;
    println!("{} reduced words, all move H outside: {}", scan.words.len(), scan.all_outside);
    for e in &scan.extras {
        println!("extra {:?}: fixes H {}, preserves chamber {}", e.vector, e.fixes_controller, e.preserves_chamber);
    }
    Ok(())
}
