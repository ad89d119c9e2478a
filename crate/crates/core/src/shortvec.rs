//! Fincke–Pohst enumeration of short vectors in definite lattices, in exact
//! arithmetic, and the divisibility-filtered search for primitive vectors of
//! a given type.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::{canonical_sign, gcd_slice, isqrt, Int, IntMatrix, Rat};

/// Exact decomposition `Q(x) = Σ d_i (x_i + Σ_{j>i} u_ij x_j)²` of a positive
/// definite Gram matrix.
struct Cholesky {
    n: usize,
    d: Vec<Rat>,
    u: Vec<Vec<Rat>>,
}

impl Cholesky {
    fn new(g: &IntMatrix) -> Cholesky {
        let n = g.nrows();
        let mut a: Vec<Vec<Rat>> =
            (0..n).map(|i| (0..n).map(|j| Rat::from_integer(g[(i, j)].clone())).collect()).collect();
        let mut d = vec![Rat::zero(); n];
        let mut u = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            d[i] = a[i][i].clone();
            for j in i + 1..n {
                u[i][j] = &a[i][j] / &d[i];
            }
            for j in i + 1..n {
                for k in j..n {
                    let v = &u[i][j] * &u[i][k] * &d[i];
                    a[j][k] -= &v;
                    if j != k {
                        a[k][j] -= v;
                    }
                }
            }
        }
        Cholesky { n, d, u }
    }

    /// Calls `f` on every nonzero `x` with `Q(x) ≤ bound`.
    fn visit(&self, bound: &Rat, f: &mut dyn FnMut(&[Int])) {
        let n = self.n;
        if n == 0 {
            return;
        }
        let mut x = vec![Int::zero(); n];
        self.rec(n - 1, bound.clone(), &mut x, f);
    }

    fn rec(&self, i: usize, budget: Rat, x: &mut Vec<Int>, f: &mut dyn FnMut(&[Int])) {
        let mut c = Rat::zero();
        for j in i + 1..self.n {
            c -= &self.u[i][j] * Rat::from_integer(x[j].clone());
        }
        let r = &budget / &self.d[i];
        let (lo, hi) = integer_range(&c, &r);
        let mut xi = lo;
        while xi <= hi {
            let diff = Rat::from_integer(xi.clone()) - &c;
            let rest = &budget - &self.d[i] * &diff * &diff;
            x[i] = xi.clone();
            if i == 0 {
                if x.iter().any(|v| !v.is_zero()) {
                    f(x);
                }
            } else {
                self.rec(i - 1, rest, x, f);
            }
            xi += 1;
        }
        x[i] = Int::zero();
    }
}

/// Integers `x` with `(x − c)² ≤ r`.
fn integer_range(c: &Rat, r: &Rat) -> (Int, Int) {
    if r.is_negative() {
        return (Int::one(), Int::zero());
    }
    let a = c.numer();
    let b = c.denom();
    let t = (r * Rat::from_integer(b * b)).floor().to_integer();
    let s = isqrt(&t);
    let lo = (a - &s).div_ceil(b);
    let hi = (a + &s).div_floor(b);
    (lo, hi)
}

/// All nonzero `x` (both signs) with `|xᵀ G x| ≤ |bound|`.
pub fn short_vectors_all(l: &Lattice, bound: &Int) -> Result<Vec<Vec<Int>>> {
    l.ensure_definite()?;
    let g = if l.is_positive_definite() { l.gram().clone() } else { l.gram().neg() };
    let ch = Cholesky::new(&g);
    let mut out = Vec::new();
    ch.visit(&Rat::from_integer(bound.abs()), &mut |x| out.push(x.to_vec()));
    out.sort();
    Ok(out)
}

/// All nonzero vectors with `|v²| ≤ |bound|`, one per `±` pair (first nonzero
/// coordinate positive), sorted lexicographically.
pub fn short_vectors(l: &Lattice, bound: &Int) -> Result<Vec<Vec<Int>>> {
    let mut out: Vec<Vec<Int>> = short_vectors_all(l, bound)?
        .into_iter()
        .filter(|v| canonical_sign(v) == *v)
        .collect();
    out.sort();
    Ok(out)
}

pub fn short_vectors_i64(l: &Lattice, bound: i64) -> Result<Vec<Vec<Int>>> {
    short_vectors(l, &Int::from(bound))
}

/// Vectors of `M` primitive in `L` with `v² = square` and `div(v, L) = γ`, in
/// ambient coordinates, one per `±` pair. Searches `M ∩ γL^∨`.
pub fn primitive_vectors_of_type(m: &Sublattice, square: &Int, gamma: &Int) -> Result<Vec<Vec<Int>>> {
    let l = m.ambient();
    let lm = m.as_lattice()?;
    lm.ensure_definite()?;
    if m.rank() == 0 || square.is_zero() {
        return Ok(Vec::new());
    }
    if lm.is_positive_definite() != square.is_positive() {
        return Ok(Vec::new());
    }
    let scaled = m.intersect_scaled_dual(gamma)?;
    let sl = scaled.as_lattice()?;
    let mut out = Vec::new();
    for c in short_vectors_all(&sl, square)? {
        if &sl.square(&c) != square {
            continue;
        }
        let v = scaled.to_ambient(&c);
        if canonical_sign(&v) != v || !gcd_slice(&v).is_one() {
            continue;
        }
        if &l.divisibility(&v)? == gamma {
            out.push(v);
        }
    }
    out.sort();
    Ok(out)
}

/// First vector of the given type, if any.
pub fn has_vector_of_type(m: &Sublattice, square: &Int, gamma: &Int) -> Result<Option<Vec<Int>>> {
    Ok(primitive_vectors_of_type(m, square, gamma)?.into_iter().next())
}

/// Exact per-coordinate bounds `|x_i| ≤ floor(sqrt(|bound| · (G⁻¹)_ii))`.
pub fn coordinate_bounds(l: &Lattice, bound: &Int) -> Result<Vec<Int>> {
    l.ensure_definite()?;
    let inv = l.dual_basis();
    Ok((0..l.rank())
        .map(|i| {
            let t = (inv[(i, i)].abs() * Rat::from_integer(bound.abs())).floor().to_integer();
            isqrt(&t)
        })
        .collect())
}
