//! Genus symbols of even lattices in Conway–Sloane notation.
//!
//! Text grammar (whitespace between constituents is optional):
//!
//! ```text
//! symbol      := "II_" signature constituent*
//! signature   := "(" int "," int ")" | "{(" int "," int ")}"
//! constituent := scale (sup sub? | sub sup)
//! scale       := prime power > 1, decimal
//! sup         := "^" ( "{" ["+"|"-"] digits "}" | ["+"|"-"] digits )
//! sub         := "_" ( "{" digit "}" | digit )
//! ```
//!
//! A constituent `q^{±n}` has rank `n` and sign `±`; for `q` a power of 2
//! the subscript is the oddity of a type I constituent. An unbraced rank is
//! read greedily, except that a digit run followed directly by `^` or `{` only
//! contributes its first digit (so `3^15^1` reads as `3^1 5^1`). Scale-1
//! constituents are not printed; the parser recovers them from the rank and
//! the sign `(−1)^q` of the determinant. The printer always emits the oddity
//! of type I constituents and separates constituents by single spaces.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{Int, Rat};
use crate::padic::{legendre, prime_factors, residue, valuation_rat};

/// One Jordan constituent `q^{ε n}` with `q = p^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub exponent: u32,
    pub rank: usize,
    pub sign: i8,
    /// Type I (odd); only meaningful at `p = 2`.
    pub odd: bool,
    /// Oddity in `Z/8`; zero unless `odd`.
    pub oddity: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalSymbol {
    pub prime: u64,
    /// Nonzero-rank constituents by increasing exponent, scale 1 included.
    pub constituents: Vec<Constituent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenusSymbol {
    pub signature: (usize, usize),
    /// Local symbols at every prime dividing `2 det`, increasing.
    pub locals: Vec<LocalSymbol>,
}

/// Block of a `p`-adic Jordan splitting: scale exponent and a 1×1 or 2×2 Gram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanBlock {
    pub exponent: u32,
    pub gram: Vec<Vec<Rat>>,
}

fn val(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(valuation_rat(x, p))
    }
}

/// Exact `p`-adic Jordan splitting of a Gram matrix into 1×1 blocks (and
/// 2×2 even blocks at `p = 2`), by congruence over `Z_(p)`.
pub fn jordan_blocks(l: &Lattice, p: u64) -> Vec<JordanBlock> {
    let n = l.rank();
    let mut a: Vec<Vec<Rat>> =
        (0..n).map(|i| (0..n).map(|j| Rat::from_integer(l.gram()[(i, j)].clone())).collect()).collect();
    let mut out = Vec::new();
    let mut s = 0;
    while s < n {
        let mut min: Option<i64> = None;
        for i in s..n {
            for j in i..n {
                if let Some(v) = val(&a[i][j], p) {
                    min = Some(min.map_or(v, |m: i64| m.min(v)));
                }
            }
        }
        let k = min.expect("nondegenerate");
        if let Some(i) = (s..n).find(|&i| val(&a[i][i], p) == Some(k)) {
            swap(&mut a, s, i);
            let piv = a[s][s].clone();
            for r in s + 1..n {
                if a[r][s].is_zero() {
                    continue;
                }
                let f = &a[r][s] / &piv;
                add_multiple(&mut a, r, s, &-f);
            }
            out.push(JordanBlock { exponent: k as u32, gram: vec![vec![piv]] });
            s += 1;
            continue;
        }
        let (i, j) = (s..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| val(&a[i][j], p) == Some(k))
            .expect("minimum attained");
        if p != 2 {
            // e_i += e_j makes the diagonal entry reach the minimal valuation
            add_multiple(&mut a, i, j, &Rat::one());
            continue;
        }
        swap(&mut a, s, i);
        let j = if j == s { i } else { j };
        swap(&mut a, s + 1, j);
        let (b00, b01, b11) = (a[s][s].clone(), a[s][s + 1].clone(), a[s + 1][s + 1].clone());
        let det = &b00 * &b11 - &b01 * &b01;
        for r in s + 2..n {
            let (x0, x1) = (a[r][s].clone(), a[r][s + 1].clone());
            if x0.is_zero() && x1.is_zero() {
                continue;
            }
            // (c0, c1) = (x0, x1) B⁻¹
            let c0 = (&x0 * &b11 - &x1 * &b01) / &det;
            let c1 = (&x1 * &b00 - &x0 * &b01) / &det;
            add_multiple(&mut a, r, s, &-c0);
            add_multiple(&mut a, r, s + 1, &-c1);
        }
        out.push(JordanBlock { exponent: k as u32, gram: vec![vec![b00, b01.clone()], vec![b01, b11]] });
        s += 2;
    }
    out
}

fn swap(a: &mut [Vec<Rat>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// `e_dst += f e_src` as a congruence.
fn add_multiple(a: &mut [Vec<Rat>], dst: usize, src: usize, f: &Rat) {
    let n = a.len();
    for c in 0..n {
        let v = &a[src][c] * f;
        a[dst][c] += v;
    }
    for r in 0..n {
        let v = &a[r][src] * f;
        a[r][dst] += v;
    }
}

fn block_det(g: &[Vec<Rat>]) -> Rat {
    if g.len() == 1 {
        g[0][0].clone()
    } else {
        &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0]
    }
}

/// `+1` iff the 2-adic unit is `±1 mod 8`.
fn sign2(u: &Rat) -> i8 {
    if matches!(residue(u, 8), 1 | 7) {
        1
    } else {
        -1
    }
}

fn local_symbol(l: &Lattice, p: u64) -> LocalSymbol {
    let blocks = jordan_blocks(l, p);
    let mut exps: Vec<u32> = blocks.iter().map(|b| b.exponent).collect();
    exps.sort();
    exps.dedup();
    let pp = Rat::from_integer(Int::from(p));
    let mut cons = Vec::new();
    for k in exps {
        let mine: Vec<&JordanBlock> = blocks.iter().filter(|b| b.exponent == k).collect();
        let rank: usize = mine.iter().map(|b| b.gram.len()).sum();
        let det: Rat = mine.iter().map(|b| block_det(&b.gram)).fold(Rat::one(), |a, b| a * b);
        let unit = det / pp.pow((k as usize * rank) as i32);
        let scale = pp.pow(k as i32);
        if p == 2 {
            let odd = mine.iter().any(|b| b.gram.len() == 1);
            let oddity = mine
                .iter()
                .filter(|b| b.gram.len() == 1)
                .map(|b| residue(&(&b.gram[0][0] / &scale), 8))
                .sum::<u64>()
                % 8;
            cons.push(Constituent { exponent: k, rank, sign: sign2(&unit), odd, oddity: oddity as u8 });
        } else {
            let s = legendre(&Int::from(residue(&unit, p)), p);
            cons.push(Constituent { exponent: k, rank, sign: s, odd: false, oddity: 0 });
        }
    }
    LocalSymbol { prime: p, constituents: cons }
}

/// Runs of type I constituents with consecutive exponents (list indices).
fn compartments(c: &[Constituent]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < c.len() {
        if c[i].odd {
            let mut v = c[i].exponent;
            let mut comp = Vec::new();
            while i < c.len() && c[i].odd && c[i].exponent == v {
                comp.push(i);
                i += 1;
                v += 1;
            }
            out.push(comp);
        } else {
            i += 1;
        }
    }
    out
}

/// Maximal index ranges along which signs may be walked.
fn trains(c: &[Constituent]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if c.is_empty() {
        return out;
    }
    let mut cur = vec![0];
    for i in 1..c.len() {
        let (prev, now) = (&c[i - 1], &c[i]);
        let gap = now.exponent - prev.exponent;
        let both_odd = prev.odd && now.odd;
        let breaks = gap > 2 || (gap == 2 && !both_odd) || (!prev.odd && !now.odd);
        if breaks {
            out.push(std::mem::replace(&mut cur, vec![i]));
        } else {
            cur.push(i);
        }
    }
    out.push(cur);
    out
}

/// Canonical form of a 2-adic symbol: oddity fusion on compartments and sign
/// walking inside trains towards the train start.
fn canonical_2adic(c: &[Constituent]) -> Vec<Constituent> {
    let mut s = c.to_vec();
    let comps = compartments(&s);
    for comp in &comps {
        let total: u32 = comp.iter().map(|&i| s[i].oddity as u32).sum::<u32>() % 8;
        for &i in comp {
            s[i].oddity = 0;
        }
        s[comp[0]].oddity = total as u8;
    }
    for train in trains(&s) {
        for &t1 in train.iter().skip(1).rev() {
            if s[t1].sign == -1 {
                s[t1].sign = 1;
                s[t1 - 1].sign = -s[t1 - 1].sign;
                for comp in &comps {
                    if comp.contains(&(t1 - 1)) || comp.contains(&t1) {
                        let o = s[comp[0]].oddity;
                        s[comp[0]].oddity = (o + 4) % 8;
                    }
                }
            }
        }
    }
    s
}

impl GenusSymbol {
    /// Canonical genus symbol of an even lattice.
    pub fn of(l: &Lattice) -> Result<GenusSymbol> {
        l.ensure_even()?;
        let mut primes = prime_factors(&(l.det() * Int::from(2)))?;
        primes.sort();
        primes.dedup();
        let locals = primes.into_iter().map(|p| local_symbol(l, p)).collect();
        Ok(GenusSymbol { signature: l.signature(), locals }.canonical())
    }

    pub fn rank(&self) -> usize {
        self.signature.0 + self.signature.1
    }

    /// Determinant implied by the symbol: `(−1)^q ∏ q^n`.
    pub fn det(&self) -> Int {
        let mut d = if self.signature.1 % 2 == 0 { Int::one() } else { -Int::one() };
        for loc in &self.locals {
            for c in &loc.constituents {
                d *= Int::from(loc.prime).pow(c.exponent * c.rank as u32);
            }
        }
        d
    }

    /// Same genus, in the canonical normal form.
    pub fn canonical(&self) -> GenusSymbol {
        let locals = self
            .locals
            .iter()
            .map(|loc| {
                let cons = if loc.prime == 2 { canonical_2adic(&loc.constituents) } else { loc.constituents.clone() };
                LocalSymbol { prime: loc.prime, constituents: cons }
            })
            .collect();
        GenusSymbol { signature: self.signature, locals }
    }

    /// Checks rank sums, type II parity and the oddity formula.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let n = self.rank();
        let sig = self.signature.0 as i64 - self.signature.1 as i64;
        let mut lhs = sig;
        let mut oddity = 0i64;
        for loc in &self.locals {
            let total: usize = loc.constituents.iter().map(|c| c.rank).sum();
            if total != n {
                return Err(format!("ranks at {} sum to {total}, expected {n}", loc.prime));
            }
            for c in &loc.constituents {
                let anti = c.exponent % 2 == 1 && c.sign == -1;
                if loc.prime == 2 {
                    if !c.odd && c.rank % 2 == 1 {
                        return Err(format!("type II constituent 2^{} of odd rank", c.exponent));
                    }
                    oddity += c.oddity as i64 + if anti { 4 } else { 0 };
                } else {
                    let q = Int::from(loc.prime).pow(c.exponent);
                    let qm = (q - Int::one()).mod_floor(&Int::from(8));
                    let qm: i64 = i64::try_from(qm).unwrap();
                    lhs += c.rank as i64 * qm + if anti { 4 } else { 0 };
                }
            }
        }
        if (lhs - oddity).rem_euclid(8) != 0 {
            return Err(format!(
                "oddity formula fails: signature plus excesses is {} mod 8, oddity is {} mod 8",
                lhs.rem_euclid(8),
                oddity.rem_euclid(8)
            ));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<GenusSymbol> {
        Parser { s: text.as_bytes(), pos: 0 }.symbol()
    }
}

/// Whether two even lattices lie in the same genus.
pub fn same_genus(a: &Lattice, b: &Lattice) -> Result<bool> {
    Ok(GenusSymbol::of(a)? == GenusSymbol::of(b)?)
}

pub fn genus_symbol(l: &Lattice) -> Result<GenusSymbol> {
    GenusSymbol::of(l)
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "II_({},{})", self.signature.0, self.signature.1)?;
        let mut first = true;
        for loc in &self.locals {
            for c in loc.constituents.iter().filter(|c| c.exponent > 0) {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                let q = Int::from(loc.prime).pow(c.exponent);
                let sign = if c.sign < 0 { "-" } else { "" };
                write!(f, "{q}^{sign}{}", c.rank)?;
                if loc.prime == 2 && c.odd {
                    write!(f, "_{}", c.oddity)?;
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

struct RawConstituent {
    prime: u64,
    exponent: u32,
    rank: usize,
    sign: i8,
    oddity: Option<u8>,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            Ok(())
        } else {
            self.err(&format!("expected `{tok}`"))
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn number(&mut self) -> Result<usize> {
        let d = self.digits()?;
        d.parse().map_err(|_| Error::Parse { pos: self.pos, msg: "number out of range".into() })
    }

    fn symbol(mut self) -> Result<GenusSymbol> {
        self.skip_ws();
        if self.s[self.pos..].starts_with(b"I_") {
            return self.err("only even genus symbols (II) are supported");
        }
        self.expect("II_")?;
        let braced = self.eat(b'{');
        self.expect("(")?;
        self.skip_ws();
        let p = self.number()?;
        self.skip_ws();
        self.expect(",")?;
        self.skip_ws();
        let q = self.number()?;
        self.skip_ws();
        self.expect(")")?;
        if braced {
            self.expect("}")?;
        }
        let mut raw = Vec::new();
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
            raw.push(self.constituent()?);
        }
        build(p, q, raw).map_err(|msg| Error::Parse { pos: self.pos, msg })
    }

    fn constituent(&mut self) -> Result<RawConstituent> {
        let start = self.pos;
        let scale: u64 = self.digits()?.parse().map_err(|_| Error::Parse { pos: start, msg: "scale out of range".into() })?;
        let (prime, exponent) = match prime_power(scale) {
            Some(x) => x,
            None => return Err(Error::Parse { pos: start, msg: format!("scale {scale} is not a prime power > 1") }),
        };
        let mut sup = None;
        let mut sub = None;
        for _ in 0..2 {
            if self.peek() == Some(b'^') && sup.is_none() {
                self.pos += 1;
                sup = Some(self.superscript()?);
            } else if self.peek() == Some(b'_') && sub.is_none() {
                self.pos += 1;
                sub = Some(self.subscript()?);
            }
        }
        let (sign, rank) = match sup {
            Some(x) => x,
            None => return self.err("constituent without `^rank`"),
        };
        if sub.is_some() && prime != 2 {
            return self.err("oddity subscript on an odd prime");
        }
        Ok(RawConstituent { prime, exponent, rank, sign, oddity: sub })
    }

    fn superscript(&mut self) -> Result<(i8, usize)> {
        if self.eat(b'{') {
            let sign = self.sign();
            let n = self.number()?;
            self.expect("}")?;
            return Ok((sign, n));
        }
        let sign = self.sign();
        let start = self.pos;
        self.digits()?;
        if matches!(self.peek(), Some(b'^') | Some(b'{')) && self.pos - start > 1 {
            self.pos = start + 1;
        }
        let n = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap();
        Ok((sign, n))
    }

    fn sign(&mut self) -> i8 {
        if self.eat(b'-') {
            -1
        } else {
            self.eat(b'+');
            1
        }
    }

    fn subscript(&mut self) -> Result<u8> {
        let braced = self.eat(b'{');
        let c = match self.peek() {
            Some(c) if c.is_ascii_digit() => c - b'0',
            _ => return self.err("expected oddity digit"),
        };
        self.pos += 1;
        if braced {
            self.expect("}")?;
        }
        if c > 7 {
            return self.err("oddity must lie in 0..8");
        }
        Ok(c)
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut r = q;
    let mut k = 0;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    if r == 1 {
        Some((p, k))
    } else {
        None
    }
}

fn build(p: usize, q: usize, raw: Vec<RawConstituent>) -> std::result::Result<GenusSymbol, String> {
    let n = p + q;
    let mut primes: Vec<u64> = raw.iter().map(|c| c.prime).collect();
    primes.push(2);
    primes.sort();
    primes.dedup();
    let mut det = if q % 2 == 0 { Int::one() } else { -Int::one() };
    for c in &raw {
        det *= Int::from(c.prime).pow(c.exponent * c.rank as u32);
    }
    let mut locals = Vec::new();
    for &pr in &primes {
        let mut cons: Vec<Constituent> = raw
            .iter()
            .filter(|c| c.prime == pr)
            .map(|c| Constituent {
                exponent: c.exponent,
                rank: c.rank,
                sign: c.sign,
                odd: c.oddity.is_some(),
                oddity: c.oddity.unwrap_or(0),
            })
            .collect();
        cons.sort_by_key(|c| c.exponent);
        if cons.windows(2).any(|w| w[0].exponent == w[1].exponent) {
            return Err(format!("repeated scale at prime {pr}"));
        }
        let used: usize = cons.iter().map(|c| c.rank).sum();
        if used > n {
            return Err(format!("constituent ranks at {pr} exceed the rank {n}"));
        }
        let unit = Rat::from_integer(det.clone());
        let unit = unit / Rat::from_integer(Int::from(pr).pow(crate::padic::valuation(&det, pr)));
        let chi = if pr == 2 { sign2(&unit) } else { legendre(&Int::from(residue(&unit, pr)), pr) };
        let rest: i8 = cons.iter().map(|c| c.sign).product();
        if n > used {
            cons.insert(0, Constituent { exponent: 0, rank: n - used, sign: chi * rest, odd: false, oddity: 0 });
        }
        locals.push(LocalSymbol { prime: pr, constituents: cons });
    }
    Ok(GenusSymbol { signature: (p, q), locals })
}
