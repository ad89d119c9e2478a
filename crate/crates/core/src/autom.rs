//! Backtracking on short-vector images for definite lattices: automorphism
//! groups with exact order from a stabilizer chain, and isometry tests.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::lll::lll_gram;
use crate::matrix::{Int, IntMatrix};
use crate::shortvec::short_vectors_all;

/// Tuning knobs for the definite engines.
#[derive(Clone, Debug)]
pub struct AutomOptions {
    pub rank_cap: usize,
    /// Maximal size of the short-vector set used as candidate images.
    pub vector_cap: usize,
    pub use_lll: bool,
}

impl Default for AutomOptions {
    fn default() -> Self {
        AutomOptions { rank_cap: 12, vector_cap: 2_000_000, use_lll: true }
    }
}

/// Generators (column convention, original basis) and exact order of `O(L)`.
#[derive(Clone, Debug)]
pub struct AutomorphismData {
    pub generators: Vec<IntMatrix>,
    pub order: Int,
    /// Orbit lengths of the stabilizer chain, top level first.
    pub orbit_lengths: Vec<usize>,
}

struct Reduced {
    /// Rows are the reduced basis in original coordinates.
    t: IntMatrix,
    b: IntMatrix,
}

fn positive_gram(l: &Lattice) -> IntMatrix {
    if l.is_positive_definite() {
        l.gram().clone()
    } else {
        l.gram().neg()
    }
}

fn reduce(g: &IntMatrix, opts: &AutomOptions) -> Reduced {
    let t = if opts.use_lll { lll_gram(g) } else { IntMatrix::identity(g.nrows()) };
    let b = t.mul(g).mul(&t.transpose());
    Reduced { t, b }
}

fn to_i64(x: &Int) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow)
}

fn mat_i64(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_i64_rows().ok_or(Error::Overflow)
}

/// Candidate image vectors for a source Gram `src` inside a target lattice
/// with reduced Gram `dst`.
struct Engine {
    n: usize,
    src: Vec<Vec<i64>>,
    vecs: Vec<Vec<i64>>,
    bvecs: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    cand: Vec<Vec<usize>>,
}

impl Engine {
    fn new(src: &IntMatrix, dst: &IntMatrix, opts: &AutomOptions) -> Result<Engine> {
        let n = src.nrows();
        let src64 = mat_i64(src)?;
        let dst64 = mat_i64(dst)?;
        let bound = (0..n).map(|i| src[(i, i)].clone()).max().unwrap_or_else(Int::zero);
        let dl = Lattice::new(dst.clone())?;
        let all = short_vectors_all(&dl, &bound)?;
        if all.len() > opts.vector_cap {
            return Err(Error::TooLarge { what: "short vector set", size: all.len() as u128, cap: opts.vector_cap as u128 });
        }
        let mut vecs = Vec::with_capacity(all.len());
        for v in &all {
            vecs.push(v.iter().map(to_i64).collect::<Result<Vec<_>>>()?);
        }
        let mut bvecs = Vec::with_capacity(vecs.len());
        for v in &vecs {
            let mut bv = vec![0i64; n];
            for (i, out) in bv.iter_mut().enumerate() {
                let mut acc: i128 = 0;
                for j in 0..n {
                    acc += dst64[i][j] as i128 * v[j] as i128;
                }
                *out = i64::try_from(acc).map_err(|_| Error::Overflow)?;
            }
            bvecs.push(bv);
        }
        let index = vecs.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut e = Engine { n, src: src64, vecs, bvecs, index, cand: Vec::new() };
        e.cand = (0..n)
            .map(|k| (0..e.vecs.len()).filter(|&i| e.prod(i, i) == e.src[k][k]).collect())
            .collect();
        Ok(e)
    }

    fn prod(&self, i: usize, j: usize) -> i64 {
        let mut acc: i128 = 0;
        for (a, b) in self.vecs[i].iter().zip(&self.bvecs[j]) {
            acc += *a as i128 * *b as i128;
        }
        acc as i64
    }

    fn consistent(&self, level: usize, c: usize, images: &[usize]) -> bool {
        images.iter().enumerate().all(|(i, &x)| self.prod(c, x) == self.src[i][level])
    }

    /// Depth-first completion of `images` to a full list of basis images.
    fn extend(&self, images: &mut Vec<usize>) -> bool {
        let level = images.len();
        if level == self.n {
            return true;
        }
        for &c in &self.cand[level] {
            if self.consistent(level, c, images) {
                images.push(c);
                if self.extend(images) {
                    return true;
                }
                images.pop();
            }
        }
        false
    }

    fn matrix(&self, images: &[usize]) -> Vec<Vec<i64>> {
        // columns are the images
        (0..self.n).map(|r| images.iter().map(|&c| self.vecs[c][r]).collect()).collect()
    }

    fn permutation(&self, m: &[Vec<i64>]) -> Result<Vec<usize>> {
        let mut perm = Vec::with_capacity(self.vecs.len());
        for v in &self.vecs {
            let mut w = vec![0i64; self.n];
            for (r, out) in w.iter_mut().enumerate() {
                let mut acc: i128 = 0;
                for c in 0..self.n {
                    acc += m[r][c] as i128 * v[c] as i128;
                }
                *out = i64::try_from(acc).map_err(|_| Error::Overflow)?;
            }
            perm.push(*self.index.get(&w).ok_or(Error::NotAnIsometry)?);
        }
        Ok(perm)
    }

    fn basis_index(&self, k: usize) -> usize {
        let mut e = vec![0i64; self.n];
        e[k] = 1;
        self.index[&e]
    }
}

fn orbit(start: usize, perms: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = HashSet::from([start]);
    let mut queue = vec![start];
    let mut i = 0;
    while i < queue.len() {
        let p = queue[i];
        i += 1;
        for perm in perms {
            let q = perm[p];
            if seen.insert(q) {
                queue.push(q);
            }
        }
    }
    queue
}

fn back_to_original(m: &[Vec<i64>], red: &Reduced, t_inv_t: &IntMatrix) -> IntMatrix {
    let mm = IntMatrix::from_i64(m);
    red.t.transpose().mul(&mm).mul(t_inv_t)
}

/// `O(L)` for a definite lattice `L`.
pub fn automorphism_group_definite(l: &Lattice, opts: &AutomOptions) -> Result<AutomorphismData> {
    l.ensure_definite()?;
    let n = l.rank();
    if n > opts.rank_cap {
        return Err(Error::RankCapExceeded { rank: n, cap: opts.rank_cap });
    }
    if n == 0 {
        return Ok(AutomorphismData { generators: vec![], order: Int::one(), orbit_lengths: vec![] });
    }
    let g = positive_gram(l);
    let red = reduce(&g, opts);
    let t_inv_t = red.t.unimodular_inverse().expect("unimodular").transpose();
    let eng = Engine::new(&red.b, &red.b, opts)?;
    let basis: Vec<usize> = (0..n).map(|k| eng.basis_index(k)).collect();

    let mut gens: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut lengths = vec![0usize; n];
    for k in (0..n).rev() {
        let prefix = &basis[..k];
        let mut orb: HashSet<usize> = orbit(basis[k], &perms).into_iter().collect();
        let mut dead: HashSet<usize> = HashSet::new();
        for &c in &eng.cand[k] {
            if orb.contains(&c) || dead.contains(&c) || !eng.consistent(k, c, prefix) {
                continue;
            }
            let mut images = prefix.to_vec();
            images.push(c);
            if eng.extend(&mut images) {
                let m = eng.matrix(&images);
                perms.push(eng.permutation(&m)?);
                gens.push(m);
                orb = orbit(basis[k], &perms).into_iter().collect();
            } else {
                dead.extend(orbit(c, &perms));
            }
        }
        lengths[k] = orb.len();
    }
    let order = lengths.iter().fold(Int::one(), |acc, &x| acc * Int::from(x));
    let generators: Vec<IntMatrix> = gens.iter().map(|m| back_to_original(m, &red, &t_inv_t)).collect();
    for m in &generators {
        if &m.transpose().mul(l.gram()).mul(m) != l.gram() {
            return Err(Error::NotAnIsometry);
        }
    }
    Ok(AutomorphismData { generators, order, orbit_lengths: lengths })
}

/// An explicit `T` with `Tᵀ G₂ T = G₁`, or `None` if the lattices are not
/// isometric.
pub fn is_isometric_definite(l1: &Lattice, l2: &Lattice, opts: &AutomOptions) -> Result<Option<IntMatrix>> {
    l1.ensure_definite()?;
    l2.ensure_definite()?;
    if l1.rank() != l2.rank() || l1.signature() != l2.signature() || l1.det() != l2.det() {
        return Ok(None);
    }
    let n = l1.rank();
    if n == 0 {
        return Ok(Some(IntMatrix::zeros(0, 0)));
    }
    let r1 = reduce(&positive_gram(l1), opts);
    let r2 = reduce(&positive_gram(l2), opts);
    let eng = Engine::new(&r1.b, &r2.b, opts)?;
    let mut images = Vec::new();
    if !eng.extend(&mut images) {
        return Ok(None);
    }
    let m = IntMatrix::from_i64(&eng.matrix(&images));
    let t1_inv_t = r1.t.unimodular_inverse().expect("unimodular").transpose();
    let t = r2.t.transpose().mul(&m).mul(&t1_inv_t);
    debug_assert_eq!(&t.transpose().mul(l2.gram()).mul(&t), l1.gram());
    Ok(Some(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{a, d, e, rank_one};

    fn order(l: &Lattice) -> Int {
        automorphism_group_definite(l, &AutomOptions::default()).unwrap().order
    }

    #[test]
    fn small_orders() {
        assert_eq!(order(&rank_one(-2).unwrap()), Int::from(2));
        assert_eq!(order(&a(2).unwrap()), Int::from(12));
        assert_eq!(order(&rank_one(-2).unwrap().direct_sum(&rank_one(-4).unwrap())), Int::from(4));
        assert_eq!(order(&a(3).unwrap()), Int::from(48));
        assert_eq!(order(&d(4).unwrap()), Int::from(1152));
    }

    #[test]
    fn e8_order() {
        assert_eq!(order(&e(8).unwrap()), "696729600".parse::<Int>().unwrap());
    }

    #[test]
    fn isometry_found_after_basis_change() {
        let a2 = a(2).unwrap();
        let p = IntMatrix::from_i64(&[[0, 1], [1, 0]]);
        let b = a2.transformed(&p).unwrap();
        let t = is_isometric_definite(&a2, &b, &AutomOptions::default()).unwrap().unwrap();
        assert_eq!(&t.transpose().mul(b.gram()).mul(&t), a2.gram());

        let x = Lattice::from_i64(&[[4, 0], [0, 30]]).unwrap();
        let p = IntMatrix::from_i64(&[[3, 2], [4, 3]]);
        let y = x.transformed(&p).unwrap();
        let t = is_isometric_definite(&x, &y, &AutomOptions::default()).unwrap().unwrap();
        assert_eq!(&t.transpose().mul(y.gram()).mul(&t), x.gram());

        let c = Lattice::from_i64(&[[2, 0], [0, 2]]).unwrap();
        let h = Lattice::from_i64(&[[2, 1], [1, 2]]).unwrap();
        assert!(is_isometric_definite(&c, &h, &AutomOptions::default()).unwrap().is_none());
        let p = Lattice::from_i64(&[[2, 0], [0, 6]]).unwrap();
        let q = Lattice::from_i64(&[[4, 2], [2, 4]]).unwrap();
        assert!(is_isometric_definite(&p, &q, &AutomOptions::default()).unwrap().is_none());
    }
}
