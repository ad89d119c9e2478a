use hklattice::discform::{count_elements_of_order, DiscriminantForm};
use hklattice::standard::standard_lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["K3[3]", "U^2 + E8^2 + [-2]^2", "E8", "A2", "U + [-4]"] {
        let l = standard_lattice(name)?;
        let d = DiscriminantForm::new(&l)?;
        let factors: Vec<String> = d.invariant_factors().iter().map(|x| x.to_string()).collect();
        let q: Vec<String> = d.generator_q_values().iter().map(|x| x.to_string()).collect();
        println!("{name}: signature {:?}, det {}", l.signature(), l.det());
        if d.is_trivial() {
            println!("  D = 0");
        } else {
            println!("  D = Z/{} with q = [{}]", factors.join(" + Z/"), q.join(", "));
        }
        println!("  elements of order 2: {}", count_elements_of_order(&d, 2, 1 << 16)?);
        if d.order() <= 64u32.into() {
            println!("  |O(D)| = {}", d.orthogonal_group(1 << 16)?.len());
        }
    }
    Ok(())
}
