use hklattice::hk::{is_pex_free, is_wall_free, k3n_lattice, WallSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l = k3n_lattice(3)?;
    let spec = WallSpec::k3n3();
    let n = l.rank();
    let unit = |i: usize| {
        let mut v = vec![0i64; n];
        v[i] = 1;
        v
    };
    let candidates = [
        ("[-4] summand", vec![unit(n - 1)]),
        ("E8 simple root", vec![unit(6)]),
        ("two E8 simple roots", vec![unit(6), unit(7)]),
    ];
    for (name, basis) in candidates {
        let c = l.sublattice_i64(&basis)?;
        let pex = is_pex_free(&c, &spec)?;
        let wall = is_wall_free(&c, &spec)?;
        println!("{name}: pex-free {}, wall-free {}", pex.free, wall.free);
        for t in &wall.counts {
            if t.pairs > 0 {
                println!("  type {}: {} pair(s), e.g. {:?}", t.vector_type, t.pairs, t.witness.as_ref().unwrap());
            }
        }
    }
    let mut h = vec![0i64; n];
    h[0] = 2;
    h[1] = 2;
    h[n - 1] = 1;
    println!("H = 2e + 2f + w has type {} in K3[3]", l.vector_type(&hklattice::matrix::ivec(&h))?);
    Ok(())
}
