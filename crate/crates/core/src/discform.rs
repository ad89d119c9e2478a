//! Discriminant forms `D_L = L^∨/L` of even lattices, the induced action of
//! isometries, and finite-group enumeration on them (subgroups, `O(D)`,
//! anti-isometries).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{smith_normal_form, Int, IntMatrix, Rat};

/// Default cap on `|D|` for element-wise enumeration.
pub const DEFAULT_GROUP_CAP: u128 = 10_000;

/// Element of a discriminant group as coordinates modulo the invariant factors.
pub type Element = Vec<i64>;

/// Reduces `x` into `[0, m)`.
pub fn rat_mod(x: &Rat, m: &Rat) -> Rat {
    let k = (x / m).floor();
    x - k * m
}

fn two() -> Rat {
    Rat::from_integer(2.into())
}

/// The finite quadratic form of an even lattice, with generators fixed by the
/// Smith normal form of the Gram matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct DiscriminantForm {
    gram: IntMatrix,
    factors: Vec<Int>,
    mods: Vec<i64>,
    generators: Vec<Vec<Rat>>,
    /// Rows of the left Smith transform matching the nontrivial factors.
    u_rows: IntMatrix,
    q: Vec<Rat>,
    bil: Vec<Vec<Rat>>,
}

impl fmt::Debug for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiscriminantForm(factors={:?}, q={:?})", self.factors, self.q)
    }
}

impl DiscriminantForm {
    pub fn new(l: &Lattice) -> Result<DiscriminantForm> {
        l.ensure_even()?;
        let n = l.rank();
        let gram = l.gram().clone();
        if n == 0 {
            return Ok(DiscriminantForm {
                gram,
                factors: vec![],
                mods: vec![],
                generators: vec![],
                u_rows: IntMatrix::zeros(0, 0),
                q: vec![],
                bil: vec![],
            });
        }
        let snf = smith_normal_form(&gram);
        let diag = snf.diagonal();
        let idx: Vec<usize> = (0..n).filter(|&i| !diag[i].is_one()).collect();
        let factors: Vec<Int> = idx.iter().map(|&i| diag[i].clone()).collect();
        let mods: Vec<i64> = factors.iter().map(|d| i64::try_from(d).unwrap_or(i64::MAX)).collect();
        let generators: Vec<Vec<Rat>> = idx
            .iter()
            .map(|&i| {
                let d = Rat::from_integer(diag[i].clone());
                snf.v.col(i).into_iter().map(|x| Rat::from_integer(x) / &d).collect()
            })
            .collect();
        let u_rows = snf.u.select_rows(&idx);
        let rg = gram.to_rat();
        let prod = |a: &[Rat], b: &[Rat]| -> Rat {
            let gb = rg.mul_vec(b);
            a.iter().zip(&gb).map(|(x, y)| x * y).sum()
        };
        let k = generators.len();
        let q = generators.iter().map(|g| rat_mod(&prod(g, g), &two())).collect();
        let bil = (0..k)
            .map(|i| (0..k).map(|j| rat_mod(&prod(&generators[i], &generators[j]), &Rat::one())).collect())
            .collect();
        Ok(DiscriminantForm { gram, factors, mods, generators, u_rows, q, bil })
    }

    /// Invariant factors `d_1 | d_2 | …`, all `> 1`.
    pub fn invariant_factors(&self) -> &[Int] {
        &self.factors
    }

    pub fn num_generators(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> Int {
        self.factors.iter().fold(Int::one(), |a, b| a * b)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Generators as vectors of `L^∨` in the coordinates of `L`.
    pub fn generators(&self) -> &[Vec<Rat>] {
        &self.generators
    }

    /// `q(g_i)` in `[0, 2)`.
    pub fn generator_q_values(&self) -> &[Rat] {
        &self.q
    }

    /// `b(g_i, g_j)` in `[0, 1)`.
    pub fn bilinear_matrix(&self) -> &[Vec<Rat>] {
        &self.bil
    }

    pub fn moduli(&self) -> &[i64] {
        &self.mods
    }

    fn small(&self) -> Result<()> {
        if self.mods.iter().any(|&m| m == i64::MAX) {
            return Err(Error::Overflow);
        }
        Ok(())
    }

    pub fn zero(&self) -> Element {
        vec![0; self.mods.len()]
    }

    pub fn reduce(&self, a: &[i64]) -> Element {
        a.iter().zip(&self.mods).map(|(x, m)| x.rem_euclid(*m)).collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Element {
        a.iter().zip(b).zip(&self.mods).map(|((x, y), m)| (x + y).rem_euclid(*m)).collect()
    }

    pub fn neg(&self, a: &[i64]) -> Element {
        a.iter().zip(&self.mods).map(|(x, m)| (-x).rem_euclid(*m)).collect()
    }

    pub fn mul(&self, k: i64, a: &[i64]) -> Element {
        a.iter()
            .zip(&self.mods)
            .map(|(x, m)| ((k as i128 * *x as i128).rem_euclid(*m as i128)) as i64)
            .collect()
    }

    pub fn is_zero(&self, a: &[i64]) -> bool {
        a.iter().all(|x| *x == 0)
    }

    /// Order of an element.
    pub fn element_order(&self, a: &[i64]) -> i64 {
        a.iter().zip(&self.mods).fold(1i64, |acc, (x, m)| acc.lcm(&(m / x.gcd(m))))
    }

    /// Quadratic value in `[0, 2)`.
    pub fn q_value(&self, a: &[i64]) -> Rat {
        let k = a.len();
        let mut s = Rat::zero();
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            let ci = Rat::from_integer(a[i].into());
            s += &ci * &ci * &self.q[i];
            for j in i + 1..k {
                if a[j] != 0 {
                    s += two() * &ci * Rat::from_integer(a[j].into()) * &self.bil[i][j];
                }
            }
        }
        rat_mod(&s, &two())
    }

    /// Bilinear value in `[0, 1)`.
    pub fn b_value(&self, a: &[i64], b: &[i64]) -> Rat {
        let mut s = Rat::zero();
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y != 0 {
                    s += Rat::from_integer((*x as i128 * *y as i128).into()) * &self.bil[i][j];
                }
            }
        }
        rat_mod(&s, &Rat::one())
    }

    /// A representative in `L^∨` (coordinates of `L`).
    pub fn to_vector(&self, a: &[i64]) -> Vec<Rat> {
        let n = self.gram.nrows();
        let mut v = vec![Rat::zero(); n];
        for (c, g) in a.iter().zip(&self.generators) {
            if *c == 0 {
                continue;
            }
            let c = Rat::from_integer((*c).into());
            for (vi, gi) in v.iter_mut().zip(g) {
                *vi += &c * gi;
            }
        }
        v
    }

    /// Class of a dual vector `y` (coordinates of `L`).
    pub fn coordinates(&self, y: &[Rat]) -> Result<Element> {
        let gy = self.gram.to_rat().mul_vec(y);
        let mut gi = Vec::with_capacity(gy.len());
        for x in gy {
            if !x.is_integer() {
                return Err(Error::Invalid("vector is not in the dual lattice".into()));
            }
            gi.push(x.to_integer());
        }
        self.coordinates_of_gy(&gi)
    }

    /// Class of the dual vector `y` given `G·y` (an integer vector).
    pub fn coordinates_of_gy(&self, gy: &[Int]) -> Result<Element> {
        self.small()?;
        let u = self.u_rows.mul_vec(gy);
        Ok(u.iter()
            .zip(&self.factors)
            .map(|(x, d)| i64::try_from(x.mod_floor(d)).expect("reduced"))
            .collect())
    }

    /// Induced action of an isometry `g` (column convention) of `L`.
    pub fn action(&self, g: &IntMatrix) -> Result<DiscIsometry> {
        if g.nrows() != self.gram.nrows() || !g.is_square() {
            return Err(Error::SizeMismatch { expected: self.gram.nrows(), got: g.nrows() });
        }
        if &g.transpose().mul(&self.gram).mul(g) != &self.gram {
            return Err(Error::NotAnIsometry);
        }
        self.action_unchecked(g)
    }

    pub(crate) fn action_unchecked(&self, g: &IntMatrix) -> Result<DiscIsometry> {
        self.small()?;
        let rg = self.gram.to_rat();
        let gr = g.to_rat();
        let mut cols = Vec::with_capacity(self.generators.len());
        for gen in &self.generators {
            let img = gr.mul_vec(gen);
            let gy: Vec<Int> = rg.mul_vec(&img).into_iter().map(|x| x.to_integer()).collect();
            cols.push(self.coordinates_of_gy(&gy)?);
        }
        Ok(DiscIsometry { cols, mods: self.mods.clone() })
    }

    /// Every element, in mixed-radix order.
    pub fn elements(&self, cap: u128) -> Result<Vec<Element>> {
        self.small()?;
        let order = self.mods.iter().try_fold(1u128, |a, &m| a.checked_mul(m as u128)).ok_or(Error::Overflow)?;
        if order > cap {
            return Err(Error::TooLarge { what: "discriminant group", size: order, cap });
        }
        let mut out = vec![self.zero()];
        for (i, &m) in self.mods.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for e in &out {
                for c in 0..m {
                    let mut x = e.clone();
                    x[i] = c;
                    next.push(x);
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    /// All automorphisms of the group preserving `q`.
    pub fn orthogonal_group(&self, cap: u128) -> Result<Vec<DiscIsometry>> {
        let elems = self.elements(cap)?;
        let k = self.mods.len();
        let qs: Vec<Rat> = elems.iter().map(|e| self.q_value(e)).collect();
        let cands: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                (0..elems.len())
                    .filter(|&x| qs[x] == self.q[i] && self.mul(self.mods[i], &elems[x]).iter().all(|c| *c == 0))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut images: Vec<usize> = Vec::new();
        self.og_rec(&elems, &cands, &mut images, &mut out);
        out.sort_by(|a: &DiscIsometry, b| a.cols.cmp(&b.cols));
        Ok(out)
    }

    fn og_rec(&self, elems: &[Element], cands: &[Vec<usize>], images: &mut Vec<usize>, out: &mut Vec<DiscIsometry>) {
        let level = images.len();
        if level == self.mods.len() {
            // q and b preserved on generators, and b nondegenerate, so bijective
            out.push(DiscIsometry { cols: images.iter().map(|&i| elems[i].clone()).collect(), mods: self.mods.clone() });
            return;
        }
        for &c in &cands[level] {
            let ok = images
                .iter()
                .enumerate()
                .all(|(j, &x)| self.b_value(&elems[c], &elems[x]) == self.bil[level][j]);
            if ok {
                images.push(c);
                self.og_rec(elems, cands, images, out);
                images.pop();
            }
        }
    }

    /// The subgroup generated by `gens`, as a sorted element list.
    pub fn span(&self, gens: &[Element]) -> Vec<Element> {
        let mut set: BTreeSet<Element> = BTreeSet::from([self.zero()]);
        let mut frontier = vec![self.zero()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// Subgroups whose elements all satisfy `allowed`, closed under the
    /// predicate `keep` (which must be inherited by subgroups). Sorted by
    /// order, then by element list.
    pub fn subgroups_where(
        &self,
        cap: u128,
        allowed: impl Fn(&Element) -> bool,
        keep: impl Fn(&[Element]) -> bool,
    ) -> Result<Vec<Subgroup>> {
        let elems: Vec<Element> = self.elements(cap)?.into_iter().filter(|e| allowed(e)).collect();
        let mut seen: BTreeSet<Vec<Element>> = BTreeSet::new();
        let trivial = vec![self.zero()];
        seen.insert(trivial.clone());
        let mut frontier = vec![(trivial, Vec::<Element>::new())];
        let mut all = vec![];
        let limit = 200_000usize;
        while let Some((h, gens)) = frontier.pop() {
            all.push(Subgroup { elements: h.clone(), generators: gens.clone() });
            if all.len() > limit {
                return Err(Error::EnumerationCapExceeded(limit));
            }
            let hs: BTreeSet<&Element> = h.iter().collect();
            for x in &elems {
                if hs.contains(x) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(x.clone());
                let h2 = self.span(&g2);
                if !h2.iter().all(|e| allowed(e)) || !keep(&h2) {
                    continue;
                }
                if seen.insert(h2.clone()) {
                    frontier.push((h2, g2));
                }
            }
        }
        all.sort_by(|a, b| a.elements.len().cmp(&b.elements.len()).then_with(|| a.elements.cmp(&b.elements)));
        Ok(all)
    }

    pub fn subgroups(&self, cap: u128) -> Result<Vec<Subgroup>> {
        self.subgroups_where(cap, |_| true, |_| true)
    }

    /// Subgroups `H` with `q|_H ≡ 0`.
    pub fn isotropic_subgroups(&self, cap: u128) -> Result<Vec<Subgroup>> {
        self.subgroups_where(cap, |e| self.q_value(e).is_zero(), |_| true)
    }
}

/// A subgroup as its sorted element list plus a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<Element>,
    pub generators: Vec<Element>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

/// Group isomorphisms `φ: A → B` between subgroups of two discriminant forms
/// with `q_B(φ(a)) = sign · q_A(a)` (`sign = −1` for anti-isometries).
pub fn isometries_between(
    da: &DiscriminantForm,
    a: &Subgroup,
    db: &DiscriminantForm,
    b: &Subgroup,
    sign: i64,
) -> Vec<HashMap<Element, Element>> {
    if a.order() != b.order() {
        return vec![];
    }
    // independent generating sequence for A
    let mut gens: Vec<Element> = Vec::new();
    let mut span = vec![da.zero()];
    for x in &a.elements {
        if span.binary_search(x).is_err() {
            gens.push(x.clone());
            span = da.span(&gens);
        }
    }
    let target = |x: &Element| -> Rat { rat_mod(&(da.q_value(x) * Rat::from_integer(sign.into())), &two()) };
    let mut out = Vec::new();
    let mut map: HashMap<Element, Element> = HashMap::from([(da.zero(), db.zero())]);
    iso_rec(da, db, b, &gens, 0, &mut map, &target, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn iso_rec(
    da: &DiscriminantForm,
    db: &DiscriminantForm,
    b: &Subgroup,
    gens: &[Element],
    level: usize,
    map: &mut HashMap<Element, Element>,
    target: &dyn Fn(&Element) -> Rat,
    out: &mut Vec<HashMap<Element, Element>>,
) {
    if level == gens.len() {
        out.push(map.clone());
        return;
    }
    let g = &gens[level];
    let og = da.element_order(g);
    let tq = target(g);
    for y in &b.elements {
        if db.element_order(y) != og || db.q_value(y) != tq {
            continue;
        }
        // extend φ to <dom, g> by φ(h + m g) = φ(h) + m y
        let mut ext = map.clone();
        let dom: Vec<(Element, Element)> = map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut ok = true;
        'outer: for m in 1..og {
            let mg = da.mul(m, g);
            let my = db.mul(m, y);
            for (h, fh) in &dom {
                let x = da.add(h, &mg);
                let fx = db.add(fh, &my);
                match ext.get(&x) {
                    Some(prev) if *prev != fx => {
                        ok = false;
                        break 'outer;
                    }
                    Some(_) => {}
                    None => {
                        if db.q_value(&fx) != target(&x) {
                            ok = false;
                            break 'outer;
                        }
                        ext.insert(x, fx);
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let image: BTreeSet<&Element> = ext.values().collect();
        if image.len() != ext.len() {
            continue;
        }
        let mut next = ext;
        iso_rec(da, db, b, gens, level + 1, &mut next, target, out);
    }
}

/// Induced map on a discriminant group, as images of the Smith generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiscIsometry {
    /// `cols[j]` is the image of generator `j`.
    pub cols: Vec<Element>,
    pub mods: Vec<i64>,
}

impl DiscIsometry {
    pub fn identity(mods: &[i64]) -> DiscIsometry {
        let k = mods.len();
        DiscIsometry {
            cols: (0..k).map(|j| (0..k).map(|i| i64::from(i == j)).collect()).collect(),
            mods: mods.to_vec(),
        }
    }

    pub fn apply(&self, a: &[i64]) -> Element {
        let k = self.mods.len();
        let mut out = vec![0i128; k];
        for (j, c) in a.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            for i in 0..k {
                out[i] += *c as i128 * self.cols[j][i] as i128;
            }
        }
        out.iter().zip(&self.mods).map(|(x, m)| x.rem_euclid(*m as i128) as i64).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DiscIsometry) -> DiscIsometry {
        DiscIsometry { cols: other.cols.iter().map(|c| self.apply(c)).collect(), mods: self.mods.clone() }
    }

    pub fn is_identity(&self) -> bool {
        *self == DiscIsometry::identity(&self.mods)
    }
}

/// Convenience wrapper: `D_L` for an even lattice.
pub fn discriminant_form(l: &Lattice) -> Result<DiscriminantForm> {
    DiscriminantForm::new(l)
}

/// `true` iff `g` acts trivially on `D_L`.
pub fn is_stable(g: &IntMatrix, l: &Lattice) -> Result<bool> {
    Ok(DiscriminantForm::new(l)?.action(g)?.is_identity())
}

/// Number of elements of exact order `k`.
pub fn count_elements_of_order(d: &DiscriminantForm, k: i64, cap: u128) -> Result<usize> {
    Ok(d.elements(cap)?.iter().filter(|e| d.element_order(e) == k).count())
}

/// Whether `|D_L| = |det L|`.
pub fn order_matches_det(l: &Lattice) -> Result<bool> {
    Ok(DiscriminantForm::new(l)?.order() == l.det().abs())
}
