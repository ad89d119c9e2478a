//! Exact LLL reduction of a positive definite Gram matrix.
//!
//! Used only as a preconditioner: every consumer verifies its output exactly.

use num_traits::{One, Zero};

use crate::matrix::{Int, IntMatrix, Rat};

/// Returns a unimodular `T` (rows are the new basis) such that `T G Tᵀ` is
/// LLL-reduced with `δ = 3/4`. `gram` must be positive definite.
pub fn lll_gram(gram: &IntMatrix) -> IntMatrix {
    let n = gram.nrows();
    let mut g = gram.clone();
    let mut t = IntMatrix::identity(n);
    if n <= 1 {
        return t;
    }
    let delta = Rat::new(3.into(), 4.into());
    let mut k = 1;
    let (mut mu, mut bstar) = gso(&g);
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = round(&mu[k][j]);
            if !q.is_zero() {
                size_reduce(&mut g, &mut t, k, j, &q);
                for l in 0..=j {
                    let m = if l == j { Rat::one() } else { mu[j][l].clone() };
                    mu[k][l] -= Rat::from_integer(q.clone()) * m;
                }
            }
        }
        let lhs = &bstar[k] + &mu[k][k - 1] * &mu[k][k - 1] * &bstar[k - 1];
        if lhs >= &delta * &bstar[k - 1] {
            k += 1;
        } else {
            t.swap_rows(k, k - 1);
            g.swap_rows(k, k - 1);
            g.swap_cols(k, k - 1);
            let r = gso(&g);
            mu = r.0;
            bstar = r.1;
            k = k.saturating_sub(1).max(1);
        }
    }
    t
}

fn round(x: &Rat) -> Int {
    (x + Rat::new(1.into(), 2.into())).floor().to_integer()
}

fn size_reduce(g: &mut IntMatrix, t: &mut IntMatrix, k: usize, j: usize, q: &Int) {
    let neg = -q.clone();
    t.add_row_multiple(k, j, &neg);
    g.add_row_multiple(k, j, &neg);
    g.add_col_multiple(k, j, &neg);
}

fn gso(g: &IntMatrix) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let n = g.nrows();
    let mut mu = vec![vec![Rat::zero(); n]; n];
    let mut b = vec![Rat::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = Rat::from_integer(g[(i, j)].clone());
            for l in 0..j {
                s -= &mu[j][l] * &mu[i][l] * &b[l];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = Rat::from_integer(g[(i, i)].clone());
        for l in 0..i {
            s -= &mu[i][l] * &mu[i][l] * &b[l];
        }
        b[i] = s;
    }
    (mu, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_skewed_basis() {
        let g = IntMatrix::from_i64(&[[2, 1], [1, 2]]);
        let p = IntMatrix::from_i64(&[[5, 7], [2, 3]]);
        let skew = p.mul(&g).mul(&p.transpose());
        let t = lll_gram(&skew);
        assert!(t.det() == Int::one() || t.det() == -Int::one());
        let red = t.mul(&skew).mul(&t.transpose());
        assert_eq!(red[(0, 0)], Int::from(2));
        assert_eq!(red[(1, 1)], Int::from(2));
    }
}
