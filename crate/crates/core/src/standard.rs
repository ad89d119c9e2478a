//! Named lattices: `U`, `U(k)`, `[k]`, ADE root lattices (negative definite),
//! direct sums, powers and rescalings, plus the K3^[n] and Mukai lattices.
//!
//! Name grammar:
//!
//! ```text
//! sum   := term (('+' | '⊕') term)*
//! term  := atom ('(' int ')')? ('^' uint)?
//! atom  := 'U' | 'A' '_'? uint | 'D' '_'? uint | 'E' '_'? ('6'|'7'|'8')
//!        | '[' int ']' | 'K3[' uint ']' | 'Mukai' | '(' sum ')'
//! ```

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::IntMatrix;

pub fn hyperbolic_plane() -> Lattice {
    Lattice::from_i64(&[[0, 1], [1, 0]]).unwrap()
}

/// `U(k)`.
pub fn hyperbolic_plane_scaled(k: i64) -> Result<Lattice> {
    hyperbolic_plane().rescale(k)
}

/// The rank-one lattice `[k]`.
pub fn rank_one(k: i64) -> Result<Lattice> {
    Lattice::from_i64(&[[k]])
}

fn from_dynkin(n: usize, edges: &[(usize, usize)]) -> Lattice {
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = (-2).into();
    }
    for &(i, j) in edges {
        g[(i, j)] = 1.into();
        g[(j, i)] = 1.into();
    }
    Lattice::new(g).expect("root lattice is nondegenerate")
}

/// Negative definite `A_n`.
pub fn a(n: usize) -> Result<Lattice> {
    if n == 0 {
        return Err(Error::UnknownName("A0".into()));
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Ok(from_dynkin(n, &edges))
}

/// Negative definite `D_n`, `n ≥ 3` (`D_3 = A_3`).
pub fn d(n: usize) -> Result<Lattice> {
    if n < 3 {
        return Err(Error::UnknownName(format!("D{n}")));
    }
    let mut edges: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
    edges.push((n - 3, n - 1));
    Ok(from_dynkin(n, &edges))
}

/// Negative definite `E_6`, `E_7`, `E_8` (Bourbaki numbering).
pub fn e(n: usize) -> Result<Lattice> {
    if !(6..=8).contains(&n) {
        return Err(Error::UnknownName(format!("E{n}")));
    }
    // nodes 1..n: 1-3-4-5-...-n chain with 2 attached to 4
    let mut edges = vec![(0, 2), (1, 3), (2, 3)];
    for i in 4..n {
        edges.push((i - 1, i));
    }
    Ok(from_dynkin(n, &edges))
}

pub fn e8() -> Lattice {
    e(8).unwrap()
}

/// `U³ ⊕ E8² ⊕ [−2(n−1)]`, in that block order.
pub fn k3n(n: i64) -> Result<Lattice> {
    if n < 2 {
        return Err(Error::BadN(n));
    }
    let u = hyperbolic_plane();
    let e8 = e8();
    Ok(u.direct_sum(&u)
        .direct_sum(&u)
        .direct_sum(&e8)
        .direct_sum(&e8)
        .direct_sum(&rank_one(-2 * (n - 1))?))
}

/// `U⁴ ⊕ E8²`.
pub fn mukai() -> Lattice {
    let u = hyperbolic_plane();
    let e8 = e8();
    u.direct_sum(&u).direct_sum(&u).direct_sum(&u).direct_sum(&e8).direct_sum(&e8)
}

/// Builds a lattice from its name (see the module grammar).
pub fn standard_lattice(name: &str) -> Result<Lattice> {
    let mut p = NameParser { s: name.as_bytes(), pos: 0, name };
    p.skip_ws();
    let l = p.sum()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(Error::UnknownName(name.to_string()));
    }
    Ok(l)
}

struct NameParser<'a> {
    s: &'a [u8],
    pos: usize,
    name: &'a str,
}

impl NameParser<'_> {
    fn err(&self) -> Error {
        Error::UnknownName(self.name.to_string())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err())
    }

    fn uint(&mut self) -> Result<usize> {
        let v = self.int()?;
        usize::try_from(v).map_err(|_| self.err())
    }

    fn sum(&mut self) -> Result<Lattice> {
        let mut l = self.term()?;
        while self.eat("+") || self.eat("⊕") {
            l = l.direct_sum(&self.term()?);
        }
        Ok(l)
    }

    fn term(&mut self) -> Result<Lattice> {
        let mut l = self.atom()?;
        if self.eat("(") {
            let k = self.int()?;
            if !self.eat(")") {
                return Err(self.err());
            }
            l = l.rescale(k).map_err(|_| self.err())?;
        }
        if self.eat("^") {
            let k = self.uint()?;
            if k == 0 {
                return Err(self.err());
            }
            let base = l.clone();
            for _ in 1..k {
                l = l.direct_sum(&base);
            }
        }
        Ok(l)
    }

    fn atom(&mut self) -> Result<Lattice> {
        if self.eat("(") {
            let l = self.sum()?;
            if !self.eat(")") {
                return Err(self.err());
            }
            return Ok(l);
        }
        if self.eat("Mukai") {
            return Ok(mukai());
        }
        if self.eat("K3[") {
            let n = self.int()?;
            if !self.eat("]") {
                return Err(self.err());
            }
            return k3n(n);
        }
        if self.eat("[") {
            let k = self.int()?;
            if !self.eat("]") {
                return Err(self.err());
            }
            return rank_one(k).map_err(|_| self.err());
        }
        if self.eat("U") {
            return Ok(hyperbolic_plane());
        }
        for (tag, f) in [("A", a as fn(usize) -> Result<Lattice>), ("D", d), ("E", e)] {
            if self.eat(tag) {
                self.eat("_");
                let n = self.uint()?;
                return f(n).map_err(|_| self.err());
            }
        }
        Err(self.err())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Int;

    #[test]
    fn ade_invariants() {
        let e8 = standard_lattice("E8").unwrap();
        assert_eq!(e8.rank(), 8);
        assert_eq!(*e8.det(), Int::from(1));
        assert!(e8.is_even() && e8.is_negative_definite());
        let a2 = standard_lattice("A2").unwrap();
        assert_eq!(*a2.det(), Int::from(3));
        assert!(a2.is_negative_definite());
        for n in 1..8 {
            assert_eq!(a(n).unwrap().det().clone(), Int::from(if n % 2 == 0 { n as i64 + 1 } else { -(n as i64 + 1) }));
        }
        for n in 3..9 {
            let det = d(n).unwrap().det().clone();
            assert_eq!(det, Int::from(if n % 2 == 0 { 4 } else { -4 }));
        }
        assert_eq!(*e(7).unwrap().det(), Int::from(-2));
        assert_eq!(*e(6).unwrap().det(), Int::from(3));
    }

    #[test]
    fn names() {
        assert_eq!(standard_lattice("U(2)").unwrap().gram(), &IntMatrix::from_i64(&[[0, 2], [2, 0]]));
        let l = standard_lattice("U^2 + E8^2 + [-2]^2").unwrap();
        assert_eq!(l.rank(), 22);
        assert_eq!(l.signature(), (2, 20));
        let k = standard_lattice("K3[3]").unwrap();
        assert_eq!(k.signature(), (3, 20));
        assert_eq!(*k.det(), Int::from(4));
        assert_eq!(standard_lattice("Mukai").unwrap().signature(), (4, 20));
        assert_eq!(standard_lattice("A_2 ⊕ [4]").unwrap().rank(), 3);
        assert_eq!(standard_lattice("E8(-1)").unwrap().signature(), (8, 0));
        assert!(matches!(standard_lattice("F4"), Err(Error::UnknownName(_))));
        assert!(matches!(standard_lattice("U+"), Err(Error::UnknownName(_))));
        assert_eq!(k3n(1).unwrap_err(), Error::BadN(1));
    }
}
