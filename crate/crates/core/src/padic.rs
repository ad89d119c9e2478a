//! Local arithmetic: valuations, Legendre and Hilbert symbols, Hasse
//! invariants and isotropy of quadratic spaces over `Q_p` and `R`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{rational_diagonal, Lattice};
use crate::matrix::{Int, Rat};

/// A place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: &Int, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = Int::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `p`-adic valuation of a nonzero rational.
pub fn valuation_rat(x: &Rat, p: u64) -> i64 {
    valuation(x.numer(), p) as i64 - valuation(x.denom(), p) as i64
}

/// `x / p^{v_p(x)}`.
pub fn unit_part(x: &Rat, p: u64) -> Rat {
    let v = valuation_rat(x, p);
    let pp = Rat::from_integer(Int::from(p).pow(v.unsigned_abs() as u32));
    if v >= 0 {
        x / pp
    } else {
        x * pp
    }
}

/// Residue of a `p`-integral rational modulo `m` (denominator prime to `m`).
pub fn residue(x: &Rat, m: u64) -> u64 {
    let m_i = Int::from(m);
    let num = x.numer().mod_floor(&m_i);
    let den = x.denom().mod_floor(&m_i);
    let inv = mod_inverse(&den, &m_i).expect("denominator prime to modulus");
    (num * inv).mod_floor(&m_i).to_u64().unwrap()
}

fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Legendre symbol `(a/p)` for an odd prime `p`; `0` if `p | a`.
pub fn legendre(a: &Int, p: u64) -> i8 {
    let pi = Int::from(p);
    let a = a.mod_floor(&pi);
    if a.is_zero() {
        return 0;
    }
    let e = Int::from((p - 1) / 2);
    if a.modpow(&e, &pi).is_one() {
        1
    } else {
        -1
    }
}

/// Hilbert symbol `(a, b)_v` of nonzero rationals.
pub fn hilbert_symbol(a: &Rat, b: &Rat, place: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    let p = match place {
        Place::Infinity => return if a.is_negative() && b.is_negative() { -1 } else { 1 },
        Place::Prime(p) => p,
    };
    // same square classes with integral representatives
    let ai = a.numer() * a.denom();
    let bi = b.numer() * b.denom();
    let alpha = valuation(&ai, p);
    let beta = valuation(&bi, p);
    let pp = Int::from(p);
    let u = &ai / pp.pow(alpha);
    let v = &bi / pp.pow(beta);
    if p == 2 {
        let eps = |x: &Int| -> u64 { ((x.mod_floor(&Int::from(4))).to_u64().unwrap() - 1) / 2 % 2 };
        let omega = |x: &Int| -> u64 {
            let r = x.mod_floor(&Int::from(8)).to_u64().unwrap();
            ((r * r - 1) / 8) % 2
        };
        let e = eps(&u) * eps(&v) + alpha as u64 * omega(&v) + beta as u64 * omega(&u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s: i8 = if (alpha as u64 * beta as u64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
        if beta % 2 == 1 {
            s *= legendre(&u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(&v, p);
        }
        s
    }
}

/// Hasse invariant `∏_{i<j} (a_i, a_j)_v` of a diagonal form.
pub fn hasse_invariant(diag: &[Rat], place: Place) -> i8 {
    let mut c = 1;
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            c *= hilbert_symbol(&diag[i], &diag[j], place);
        }
    }
    c
}

/// Whether a nonzero rational is a square in `Q_v`.
pub fn is_local_square(x: &Rat, place: Place) -> bool {
    match place {
        Place::Infinity => x.is_positive(),
        Place::Prime(p) => {
            if valuation_rat(x, p) % 2 != 0 {
                return false;
            }
            let u = unit_part(x, p);
            if p == 2 {
                residue(&u, 8) == 1
            } else {
                legendre(&Int::from(residue(&u, p)), p) == 1
            }
        }
    }
}

/// Whether `L ⊗ Q_v` represents zero nontrivially.
pub fn is_isotropic(l: &Lattice, place: Place) -> bool {
    let diag = rational_diagonal(l.gram());
    is_isotropic_diagonal(&diag, place)
}

pub fn is_isotropic_diagonal(diag: &[Rat], place: Place) -> bool {
    let n = diag.len();
    if place == Place::Infinity {
        return diag.iter().any(|x| x.is_positive()) && diag.iter().any(|x| x.is_negative());
    }
    let d: Rat = diag.iter().fold(Rat::one(), |a, b| a * b);
    let minus_one = -Rat::one();
    let c = hasse_invariant(diag, place);
    match n {
        0 | 1 => false,
        2 => is_local_square(&-d, place),
        3 => c == hilbert_symbol(&minus_one, &-d, place),
        4 => !(is_local_square(&d, place) && c == -hilbert_symbol(&minus_one, &minus_one, place)),
        _ => true,
    }
}

/// Prime divisors of a nonzero integer, by trial division.
pub fn prime_factors(n: &Int) -> Result<Vec<u64>> {
    let mut n = n.abs();
    if n.is_zero() {
        return Err(Error::Degenerate);
    }
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while n > Int::one() {
        let pi = Int::from(p);
        if &pi * &pi > n {
            let q = n.to_u64().ok_or(Error::Overflow)?;
            out.push(q);
            break;
        }
        if p > 10_000_000 {
            return Err(Error::CapExceeded("prime factorization by trial division".into()));
        }
        if (&n % &pi).is_zero() {
            out.push(p);
            while (&n % &pi).is_zero() {
                n /= &pi;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Ok(out)
}

/// The places relevant to a lattice: primes dividing `2 det` and infinity.
pub fn relevant_places(l: &Lattice) -> Result<Vec<Place>> {
    let mut ps = prime_factors(&(l.det() * Int::from(2)))?;
    ps.sort();
    ps.dedup();
    let mut out: Vec<Place> = ps.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinity);
    Ok(out)
}

/// Necessary condition for `L ⊇ U(k)`: isotropy at every relevant place.
/// Returns the first failing place, if any.
pub fn rescaled_u_obstruction(l: &Lattice) -> Result<Option<Place>> {
    for place in relevant_places(l)? {
        if !is_isotropic(l, place) {
            return Ok(Some(place));
        }
    }
    Ok(None)
}

pub fn contains_rescaled_u_necessary_condition(l: &Lattice) -> Result<bool> {
    Ok(rescaled_u_obstruction(l)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn hilbert_examples() {
        for p in [Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Infinity] {
            for b in [-7, -1, 2, 3, 10] {
                assert_eq!(hilbert_symbol(&q(1), &q(b), p), 1);
            }
        }
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Infinity), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(5), Place::Prime(5)), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(3), Place::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(7), Place::Prime(2)), 1);
    }

    #[test]
    fn squares() {
        assert!(is_local_square(&q(17), Place::Prime(2)));
        assert!(!is_local_square(&q(3), Place::Prime(2)));
        assert!(is_local_square(&q(-1), Place::Prime(5)));
        assert!(!is_local_square(&q(-1), Place::Prime(3)));
        assert!(is_local_square(&Rat::new(4.into(), 9.into()), Place::Prime(3)));
    }

    #[test]
    fn isotropy_examples() {
        let n = Lattice::from_i64(&[[4, 2, -2], [2, -2, -1], [-2, -1, 2]]).unwrap();
        assert!(!is_isotropic(&n, Place::Prime(2)));
        assert_eq!(rescaled_u_obstruction(&n).unwrap(), Some(Place::Prime(2)));
        let u = Lattice::from_i64(&[[0, 1], [1, 0]]).unwrap();
        for p in [2, 3, 5, 7] {
            assert!(is_isotropic(&u, Place::Prime(p)));
        }
        let five = Lattice::from_i64(&[[2, 0, 0, 0, 0], [0, 2, 0, 0, 0], [0, 0, 2, 0, 0], [0, 0, 0, 2, 0], [0, 0, 0, 0, 2]]).unwrap();
        assert!(is_isotropic(&five, Place::Prime(2)));
        let w = Lattice::from_i64(&[[2, 0], [0, -4]]).unwrap();
        assert!(!contains_rescaled_u_necessary_condition(&w).unwrap());
        let uw = Lattice::from_i64(&[[0, 1, 0], [1, 0, 0], [0, 0, -2]]).unwrap();
        assert!(contains_rescaled_u_necessary_condition(&uw).unwrap());
        let d = Lattice::from_i64(&[[2, 0, 0], [0, -2, 0], [0, 0, 6]]).unwrap();
        assert!(contains_rescaled_u_necessary_condition(&d).unwrap());
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(&Int::from(784)).unwrap(), vec![2, 7]);
        assert_eq!(prime_factors(&Int::from(-420)).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(prime_factors(&Int::from(1)).unwrap(), Vec::<u64>::new());
    }
}
