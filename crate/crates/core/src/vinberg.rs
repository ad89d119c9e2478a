//! Vinberg's algorithm for hyperbolic lattices (signature `(1, n−1)`): the
//! chamber of the reflection group in roots of prescribed squares that
//! contains a controller vector `H`.
//!
//! Walls `w` are oriented so that `b(H, w) > 0`; the chamber is
//! `{x : b(x, w) ≥ 0 for every wall}`. A root is accepted as a wall when it
//! pairs nonnegatively with every wall accepted before it, which is the
//! non-obtuse condition for roots of negative square.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::isom::reflection;
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::{gcd_slice, isqrt, Int, IntMatrix, Rat};
use crate::shortvec::short_vectors_all;

#[derive(Clone, Debug)]
pub struct VinbergOptions {
    /// Replace a controller lying on a root hyperplane by a nearby generic one.
    pub perturb: bool,
    /// Largest distance `b(r, H)² / |r²|` explored in rank at least 3.
    pub max_distance: Rat,
    /// Largest number of distance shells explored in rank 2 without isotropic vectors.
    pub max_shells: usize,
}

impl Default for VinbergOptions {
    fn default() -> Self {
        VinbergOptions { perturb: false, max_distance: Rat::from_integer(Int::from(64)), max_shells: 100_000 }
    }
}

#[derive(Clone, Debug)]
pub struct ChamberData {
    pub lattice: Lattice,
    pub controller: Vec<Int>,
    pub root_squares: Vec<Int>,
    /// In acceptance order: increasing distance, then lexicographic.
    pub walls: Vec<Vec<Int>>,
    /// False when the search stopped at the distance cap.
    pub complete: bool,
    /// True when the given controller was replaced.
    pub perturbed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Interior,
    Boundary,
    Outside,
}

fn ivec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

/// Primitive with integral reflection, square in the allowed list.
fn is_root(l: &Lattice, r: &[Int], squares: &[Int]) -> bool {
    let s = l.square(r);
    if !squares.contains(&s) || !gcd_slice(r).is_one() {
        return false;
    }
    let half = &s / Int::from(2);
    l.gram().mul_vec(r).iter().all(|x| (x % &half).is_zero())
}

fn roots_orthogonal_to(l: &Lattice, h: &[Int], squares: &[Int]) -> Result<Vec<Vec<Int>>> {
    let k = Sublattice::new(l.clone(), IntMatrix::from_rows(vec![h.to_vec()]))?.orthogonal_complement();
    let kl = k.as_lattice()?;
    let bound = squares.iter().map(|s| s.abs()).max().unwrap_or_else(Int::zero);
    let mut out = Vec::new();
    for c in short_vectors_all(&kl, &bound)? {
        let r = k.to_ambient(&c);
        if is_root(l, &r, squares) {
            out.push(r);
        }
    }
    Ok(out)
}

/// The chamber containing `h` for roots with squares in `root_squares`.
pub fn fundamental_chamber(l: &Lattice, h: &[i64], root_squares: &[i64], opts: &VinbergOptions) -> Result<ChamberData> {
    if l.signature().0 != 1 || l.rank() < 2 {
        return Err(Error::NotHyperbolic);
    }
    let squares: Vec<Int> = root_squares.iter().map(|&s| Int::from(s)).collect();
    if squares.is_empty() || squares.iter().any(|s| !s.is_negative() || s.is_odd()) {
        return Err(Error::Invalid("root squares must be negative even integers".into()));
    }
    let mut hv = ivec(h);
    l.check_vector(&hv)?;
    if !l.square(&hv).is_positive() {
        return Err(Error::BadController);
    }
    let mut perturbed = false;
    if !roots_orthogonal_to(l, &hv, &squares)?.is_empty() {
        if !opts.perturb {
            return Err(Error::ControllerOnWall);
        }
        hv = perturb(l, &hv, &squares)?;
        perturbed = true;
    }
    let (walls, complete) = if l.rank() == 2 {
        match isotropic_directions(l) {
            Some((f1, f2)) => (accept(l, &hv, all_roots_isotropic_rank2(l, &f1, &f2, &squares)?, None), true),
            None => (shells(l, &hv, &squares, None, Some(opts.max_shells))?, true),
        }
    } else {
        (shells(l, &hv, &squares, Some(&opts.max_distance), None)?, false)
    };
    Ok(ChamberData { lattice: l.clone(), controller: hv, root_squares: squares, walls, complete, perturbed })
}

/// `N H + g` for the first small `g` and power of two `N` avoiding all roots.
fn perturb(l: &Lattice, h: &[Int], squares: &[Int]) -> Result<Vec<Int>> {
    let n = l.rank();
    for k in 1..=20u32 {
        let big = Int::from(2).pow(k);
        for i in 0..n {
            for sign in [1i64, -1] {
                let cand: Vec<Int> =
                    (0..n).map(|j| &big * &h[j] + if i == j { Int::from(sign) } else { Int::zero() }).collect();
                let g = gcd_slice(&cand);
                let cand: Vec<Int> = cand.iter().map(|x| x / &g).collect();
                if l.square(&cand).is_positive() && roots_orthogonal_to(l, &cand, squares)?.is_empty() {
                    return Ok(cand);
                }
            }
        }
    }
    Err(Error::ControllerOnWall)
}

fn distance(l: &Lattice, h: &[Int], r: &[Int]) -> Rat {
    let b = l.product(h, r);
    Rat::new(&b * &b, l.square(r).abs())
}

/// Vinberg acceptance over candidates, sorted by (distance, lex).
fn accept(l: &Lattice, h: &[Int], mut roots: Vec<Vec<Int>>, prior: Option<Vec<Vec<Int>>>) -> Vec<Vec<Int>> {
    roots.retain(|r| l.product(h, r).is_positive());
    roots.sort_by(|a, b| distance(l, h, a).cmp(&distance(l, h, b)).then_with(|| a.cmp(b)));
    roots.dedup();
    let mut walls = prior.unwrap_or_default();
    for r in roots {
        if walls.iter().all(|w| !l.product(&r, w).is_negative()) {
            walls.push(r);
        }
    }
    walls
}

/// Two primitive isotropic vectors of a rank-2 lattice, if `−det` is a square.
fn isotropic_directions(l: &Lattice) -> Option<(Vec<Int>, Vec<Int>)> {
    let g = l.gram();
    let (a, b, c) = (g[(0, 0)].clone(), g[(0, 1)].clone(), g[(1, 1)].clone());
    let disc = &b * &b - &a * &c;
    let t = isqrt(&disc);
    if &t * &t != disc {
        return None;
    }
    let prim = |v: Vec<Int>| {
        let g = gcd_slice(&v);
        v.into_iter().map(|x| x / &g).collect::<Vec<_>>()
    };
    if a.is_zero() {
        let other = if c.is_zero() { vec![Int::zero(), Int::one()] } else { vec![c.clone(), -Int::from(2) * &b] };
        return Some((vec![Int::one(), Int::zero()], prim(other)));
    }
    Some((prim(vec![-&b + &t, a.clone()]), prim(vec![-&b - &t, a])))
}

/// All roots of a rank-2 lattice with isotropic vectors `f1`, `f2`: writing
/// `r = (u f1 + v f2) / b(f1, f2)` forces `u v = r² b(f1, f2) / 2`.
fn all_roots_isotropic_rank2(l: &Lattice, f1: &[Int], f2: &[Int], squares: &[Int]) -> Result<Vec<Vec<Int>>> {
    let b12 = l.product(f1, f2);
    let mut out = BTreeSet::new();
    for s in squares {
        let prod = s * &b12;
        if prod.is_odd() {
            continue;
        }
        let prod = prod / Int::from(2);
        let m = prod.abs();
        let mut u = Int::one();
        while &u * &u <= m {
            if (&m % &u).is_zero() {
                let w = &m / &u;
                for x in [u.clone(), w.clone()] {
                    for sx in [1i64, -1] {
                        let uu = &x * Int::from(sx);
                        let vv = &prod / &uu;
                        let num: Vec<Int> = (0..2).map(|i| &uu * &f1[i] + &vv * &f2[i]).collect();
                        if num.iter().all(|z| (z % &b12).is_zero()) {
                            let r: Vec<Int> = num.iter().map(|z| z / &b12).collect();
                            if is_root(l, &r, squares) {
                                out.insert(r);
                            }
                        }
                    }
                }
            }
            u += 1;
        }
    }
    Ok(out.into_iter().collect())
}

/// Roots `r` with `b(r, H) = k` and `r² = s`, via `N r = a H + y`, `y ⊥ H`.
struct ShellEnumerator {
    l: Lattice,
    h: Vec<Int>,
    h2: Int,
    perp: Sublattice,
    perp_lattice: Lattice,
    index: Int,
}

impl ShellEnumerator {
    fn new(l: &Lattice, h: &[Int]) -> Result<ShellEnumerator> {
        let perp = Sublattice::new(l.clone(), IntMatrix::from_rows(vec![h.to_vec()]))?.orthogonal_complement();
        let perp_lattice = perp.as_lattice()?;
        let h2 = l.square(h);
        let sq = (&h2 * perp_lattice.det() / l.det()).abs();
        let index = isqrt(&sq);
        Ok(ShellEnumerator { l: l.clone(), h: h.to_vec(), h2, perp, perp_lattice, index })
    }

    fn roots(&self, k: &Int, s: &Int, squares: &[Int]) -> Result<Vec<Vec<Int>>> {
        let n = &self.index;
        let num = k * n;
        if !(&num % &self.h2).is_zero() {
            return Ok(vec![]);
        }
        let a = num / &self.h2;
        let target = n * n * s - &a * &a * &self.h2;
        if !target.is_negative() {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        for c in short_vectors_all(&self.perp_lattice, &target)? {
            if self.perp_lattice.square(&c) != target {
                continue;
            }
            let y = self.perp.to_ambient(&c);
            let v: Vec<Int> = (0..self.l.rank()).map(|i| &a * &self.h[i] + &y[i]).collect();
            if v.iter().all(|x| (x % n).is_zero()) {
                let r: Vec<Int> = v.iter().map(|x| x / n).collect();
                if is_root(&self.l, &r, squares) {
                    out.push(r);
                }
            }
        }
        Ok(out)
    }
}

/// Processes distance shells in increasing order until the distance cap, or
/// (in rank 2) until two walls bound the chamber.
fn shells(l: &Lattice, h: &[Int], squares: &[Int], max_distance: Option<&Rat>, max_shells: Option<usize>) -> Result<Vec<Vec<Int>>> {
    let en = ShellEnumerator::new(l, h)?;
    let mut next_k: Vec<Int> = vec![Int::one(); squares.len()];
    let mut walls: Vec<Vec<Int>> = Vec::new();
    let mut shells_done = 0usize;
    loop {
        let dist = |i: usize, k: &Int| Rat::new(k * k, squares[i].abs());
        let d = (0..squares.len()).map(|i| dist(i, &next_k[i])).min().unwrap();
        if let Some(maxd) = max_distance {
            if &d > maxd {
                return Ok(walls);
            }
        }
        let mut cands = Vec::new();
        for i in 0..squares.len() {
            if dist(i, &next_k[i]) == d {
                cands.extend(en.roots(&next_k[i], &squares[i], squares)?);
                next_k[i] += 1;
            }
        }
        walls = accept(l, h, cands, Some(walls));
        shells_done += 1;
        if l.rank() == 2 && walls.len() >= 2 {
            return Ok(walls);
        }
        if let Some(m) = max_shells {
            if shells_done > m {
                return Err(Error::CapExceeded(format!("{m} distance shells without closing the chamber")));
            }
        }
    }
}

pub fn in_chamber(x: &[Int], c: &ChamberData) -> bool {
    c.walls.iter().all(|w| !c.lattice.product(x, w).is_negative())
}

pub fn position(x: &[Int], c: &ChamberData) -> Position {
    let ps: Vec<Int> = c.walls.iter().map(|w| c.lattice.product(x, w)).collect();
    if ps.iter().any(|p| p.is_negative()) {
        Position::Outside
    } else if ps.iter().any(|p| p.is_zero()) {
        Position::Boundary
    } else {
        Position::Interior
    }
}

/// Primitive generators of `w^⊥` in a rank-2 lattice, oriented towards `H`.
pub fn wall_orthogonals(c: &ChamberData) -> Result<Vec<Vec<Int>>> {
    if c.lattice.rank() != 2 {
        return Err(Error::Invalid("wall orthogonals are vectors only in rank 2".into()));
    }
    let mut out = Vec::new();
    for w in &c.walls {
        let perp = Sublattice::new(c.lattice.clone(), IntMatrix::from_rows(vec![w.clone()]))?.orthogonal_complement();
        let mut v = perp.basis().row(0).to_vec();
        if c.lattice.product(&v, &c.controller).is_negative() {
            v = v.into_iter().map(|x| -x).collect();
        }
        out.push(v);
    }
    Ok(out)
}

/// `∏ lhs = ∏ rhs` as matrices.
pub fn check_relation(lhs: &[IntMatrix], rhs: &[IntMatrix]) -> bool {
    let prod = |ms: &[IntMatrix]| ms.iter().skip(1).fold(ms[0].clone(), |acc, m| acc.mul(m));
    !lhs.is_empty() && !rhs.is_empty() && prod(lhs) == prod(rhs)
}

#[derive(Clone, Debug)]
pub struct WordOutcome {
    /// Indices into the walls; the rightmost letter acts first.
    pub word: Vec<usize>,
    pub image: Vec<Int>,
    pub position: Position,
}

#[derive(Clone, Debug)]
pub struct ExtraReflection {
    pub vector: Vec<Int>,
    pub fixes_controller: bool,
    /// The reflection permutes the walls, hence preserves the chamber.
    pub preserves_chamber: bool,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub words: Vec<WordOutcome>,
    /// Every nonempty word moves the controller strictly outside.
    pub all_outside: bool,
    pub extras: Vec<ExtraReflection>,
}

/// Applies all reduced words up to `max_len` in the wall reflections to the
/// controller, and tests extra reflections against the chamber.
pub fn reflection_word_scan(c: &ChamberData, extra: &[Vec<Int>], max_len: usize) -> Result<ScanReport> {
    let l = &c.lattice;
    let refl: Vec<IntMatrix> = c.walls.iter().map(|w| reflection(w, l)).collect::<Result<_>>()?;
    let mut words = Vec::new();
    let mut frontier: Vec<(Vec<usize>, Vec<Int>)> = vec![(vec![], c.controller.clone())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, img) in &frontier {
            for (i, r) in refl.iter().enumerate() {
                if word.first() == Some(&i) {
                    continue;
                }
                let mut w2 = vec![i];
                w2.extend(word);
                let img2 = r.mul_vec(img);
                words.push(WordOutcome { word: w2.clone(), image: img2.clone(), position: position(&img2, c) });
                next.push((w2, img2));
            }
        }
        frontier = next;
    }
    let all_outside = words.iter().all(|w| w.position == Position::Outside);
    let wall_set: BTreeSet<Vec<Int>> = c.walls.iter().cloned().collect();
    let mut extras = Vec::new();
    for v in extra {
        let t = reflection(v, l)?;
        let images: BTreeSet<Vec<Int>> = c.walls.iter().map(|w| t.mul_vec(w)).collect();
        extras.push(ExtraReflection {
            vector: v.clone(),
            fixes_controller: t.mul_vec(&c.controller) == c.controller,
            preserves_chamber: images == wall_set,
        });
    }
    Ok(ScanReport { words, all_outside, extras })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns() -> Lattice {
        Lattice::from_i64(&[[4, 2], [2, -2]]).unwrap()
    }

    #[test]
    fn ns_chamber() {
        let c = fundamental_chamber(&ns(), &[1, 0], &[-2], &VinbergOptions::default()).unwrap();
        assert_eq!(c.walls, vec![ivec(&[0, 1]), ivec(&[1, -1])]);
        assert!(c.complete);
        let perp = wall_orthogonals(&c).unwrap();
        assert_eq!(perp, vec![ivec(&[1, 1]), ivec(&[2, -1])]);
        for v in &perp {
            assert_eq!(ns().square(v), Int::from(6));
        }
        assert_eq!(position(&ivec(&[1, 0]), &c), Position::Interior);
        assert_eq!(position(&ivec(&[1, 1]), &c), Position::Boundary);
    }

    #[test]
    fn relation_and_scan() {
        let l = ns();
        let c = fundamental_chamber(&l, &[1, 0], &[-2], &VinbergOptions::default()).unwrap();
        let d = ivec(&[-1, 2]);
        let t_plus = reflection(&ivec(&[0, 1]), &l).unwrap();
        let t_minus = reflection(&ivec(&[1, -1]), &l).unwrap();
        let t_d = reflection(&d, &l).unwrap();
        assert!(check_relation(&[t_plus, t_d.clone()], &[t_d, t_minus]));
        let scan = reflection_word_scan(&c, &[d], 6).unwrap();
        assert_eq!(scan.words.len(), 12);
        assert!(scan.all_outside);
        assert!(scan.extras[0].fixes_controller);
        assert!(scan.extras[0].preserves_chamber);
    }

    #[test]
    fn controller_on_wall_in_u() {
        let u = Lattice::from_i64(&[[0, 1], [1, 0]]).unwrap();
        let r = fundamental_chamber(&u, &[1, 1], &[-2], &VinbergOptions::default());
        assert!(matches!(r, Err(Error::ControllerOnWall)));
        let opts = VinbergOptions { perturb: true, ..VinbergOptions::default() };
        let c = fundamental_chamber(&u, &[1, 1], &[-2], &opts).unwrap();
        assert!(c.perturbed);
        assert_eq!(c.walls.len(), 1);
        let c = fundamental_chamber(&u, &[1, 2], &[-2], &VinbergOptions::default()).unwrap();
        assert_eq!(c.walls, vec![ivec(&[1, -1])]);
    }

    #[test]
    fn errors() {
        let e = Lattice::from_i64(&[[-2, 1], [1, -2]]).unwrap();
        assert!(matches!(fundamental_chamber(&e, &[1, 0], &[-2], &VinbergOptions::default()), Err(Error::NotHyperbolic)));
        assert!(matches!(fundamental_chamber(&ns(), &[0, 1], &[-2], &VinbergOptions::default()), Err(Error::BadController)));
    }

    #[test]
    fn rank_three_walls_are_non_obtuse() {
        let l = Lattice::from_i64(&[[2, 0, 0], [0, -2, 0], [0, 0, -2]]).unwrap();
        let opts = VinbergOptions { max_distance: Rat::from_integer(Int::from(20)), ..VinbergOptions::default() };
        let c = fundamental_chamber(&l, &[3, 1, 1], &[-2], &opts).unwrap();
        assert!(!c.complete);
        assert!(!c.walls.is_empty());
        for (i, w) in c.walls.iter().enumerate() {
            assert!(l.product(w, &c.controller).is_positive());
            for v in &c.walls[..i] {
                assert!(!l.product(w, v).is_negative());
            }
        }
    }
}
