use hklattice::isom::{is_stably_saturated, is_stably_saturated_relative, membership, MatrixGroup};
use hklattice::{IntMatrix, Lattice};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l = Lattice::from_i64(&[[0, 1, 0], [1, 0, 0], [0, 0, -2]])?;
    let minus = IntMatrix::from_i64(&[[1, 0, 0], [0, 1, 0], [0, 0, -1]]);
    println!("-id on [-2]: {:?}", membership(&minus, &l)?);

    let g = MatrixGroup::new(l.clone(), vec![minus])?;
    let c = g.coinvariant_sublattice();
    println!("coinvariant gram {:?}", c.gram());
    println!("G = <-id on [-2]>: {:?}", is_stably_saturated(&g, &Default::default())?);

    let trivial = MatrixGroup::trivial(l);
    println!("trivial group on the same C: {:?}", is_stably_saturated_relative(&trivial, &c, &Default::default())?);
    Ok(())
}
