//! Isometries and finite matrix groups: reflections, real spinor norms,
//! `O^+`/`O^#` membership, invariant and coinvariant sublattices, stable
//! automorphism groups of definite lattices and the stable saturation test.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::autom::{automorphism_group_definite, AutomOptions};
use crate::discform::{DiscIsometry, DiscriminantForm};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::{integer_kernel, Int, IntMatrix, Rat, RatMatrix};

/// Default cap on explicitly enumerated group elements.
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

/// Whether `mᵀ G m = G`.
pub fn is_isometry(m: &IntMatrix, l: &Lattice) -> Result<bool> {
    if !m.is_square() || m.nrows() != l.rank() {
        return Err(Error::SizeMismatch { expected: l.rank(), got: m.nrows() });
    }
    Ok(&m.transpose().mul(l.gram()).mul(m) == l.gram())
}

fn ensure_isometry(m: &IntMatrix, l: &Lattice) -> Result<()> {
    if is_isometry(m, l)? {
        Ok(())
    } else {
        Err(Error::NotAnIsometry)
    }
}

/// Rational reflection matrix `x ↦ x − 2 b(x,v)/v² · v` (column convention).
fn reflection_rat(v: &[Rat], g: &RatMatrix) -> Option<RatMatrix> {
    let gv = g.mul_vec(v);
    let vv: Rat = v.iter().zip(&gv).map(|(a, b)| a * b).sum();
    if vv.is_zero() {
        return None;
    }
    let n = v.len();
    let mut m = RatMatrix::identity(n);
    let two = Rat::from_integer(2.into());
    for i in 0..n {
        for j in 0..n {
            let t = &two * &v[i] * &gv[j] / &vv;
            m[(i, j)] -= t;
        }
    }
    Some(m)
}

/// The reflection in `v`, required to be integral on `L`.
pub fn reflection(v: &[Int], l: &Lattice) -> Result<IntMatrix> {
    l.check_vector(v)?;
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::ZeroVector);
    }
    let vr: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
    let m = reflection_rat(&vr, &l.gram().to_rat()).ok_or(Error::IsotropicVector)?;
    m.to_int().ok_or(Error::NotIntegral)
}

/// Whether the reflection in `v` is defined and integral.
pub fn reflection_is_integral(v: &[Int], l: &Lattice) -> bool {
    reflection(v, l).is_ok()
}

/// Orthogonal basis of `L ⊗ Q` (columns are rational vectors in `L` coordinates).
fn orthogonal_basis(g: &RatMatrix) -> Vec<Vec<Rat>> {
    let n = g.nrows();
    let prod = |a: &[Rat], b: &[Rat]| -> Rat {
        let gb = g.mul_vec(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    };
    let mut pool: Vec<Vec<Rat>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    let mut out: Vec<Vec<Rat>> = Vec::new();
    while !pool.is_empty() {
        // pick an anisotropic vector, combining two if all are isotropic
        let pick = match pool.iter().position(|v| !prod(v, v).is_zero()) {
            Some(i) => pool.remove(i),
            None => {
                let j = (1..pool.len()).find(|&j| !prod(&pool[0], &pool[j]).is_zero()).expect("nondegenerate");
                let v: Vec<Rat> = pool[0].iter().zip(&pool[j]).map(|(a, b)| a + b).collect();
                pool.remove(0);
                v
            }
        };
        let pp = prod(&pick, &pick);
        pool = pool
            .into_iter()
            .map(|w| {
                let c = prod(&w, &pick) / &pp;
                w.iter().zip(&pick).map(|(a, b)| a - &c * b).collect::<Vec<Rat>>()
            })
            .filter(|w| w.iter().any(|x| !x.is_zero()))
            .collect();
        out.push(pick);
    }
    out
}

/// Rational reflection vectors whose product is `g` (Cartan–Dieudonné).
pub fn reflection_decomposition(g: &IntMatrix, l: &Lattice) -> Result<Vec<Vec<Rat>>> {
    ensure_isometry(g, l)?;
    let gr = l.gram().to_rat();
    let mut h = g.to_rat();
    let mut vs = Vec::new();
    for b in orthogonal_basis(&gr) {
        let hb = h.mul_vec(&b);
        if hb == b {
            continue;
        }
        let w: Vec<Rat> = hb.iter().zip(&b).map(|(x, y)| x - y).collect();
        if let Some(r) = reflection_rat(&w, &gr) {
            h = r.mul(&h);
            vs.push(w);
        } else {
            let v1: Vec<Rat> = hb.iter().zip(&b).map(|(x, y)| x + y).collect();
            let r1 = reflection_rat(&v1, &gr).expect("(gb + b)² = 4b² ≠ 0");
            let r2 = reflection_rat(&b, &gr).expect("anisotropic basis vector");
            h = r2.mul(&r1.mul(&h));
            vs.push(v1);
            vs.push(b);
        }
    }
    debug_assert_eq!(h, RatMatrix::identity(l.rank()));
    Ok(vs)
}

/// Real spinor norm: the sign of `∏ (−v_i²/2)` over a reflection decomposition.
pub fn real_spinor_norm(g: &IntMatrix, l: &Lattice) -> Result<i8> {
    let gr = l.gram().to_rat();
    let mut sign = 1i8;
    for v in reflection_decomposition(g, l)? {
        let gv = gr.mul_vec(&v);
        let vv: Rat = v.iter().zip(&gv).map(|(a, b)| a * b).sum();
        if vv.is_positive() {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// Membership flags of an isometry of an even lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub in_o_plus: bool,
    pub in_o_sharp: bool,
    pub in_o_tilde: bool,
}

pub fn membership(g: &IntMatrix, l: &Lattice) -> Result<Membership> {
    let plus = real_spinor_norm(g, l)? == 1;
    let sharp = DiscriminantForm::new(l)?.action(g)?.is_identity();
    Ok(Membership { in_o_plus: plus, in_o_sharp: sharp, in_o_tilde: plus && sharp })
}

/// Inverse of an isometry: `G⁻¹ gᵀ G`.
pub fn isometry_inverse(g: &IntMatrix, l: &Lattice) -> IntMatrix {
    let gi = l.gram().to_rat().inverse().expect("nondegenerate");
    gi.mul(&g.transpose().to_rat()).mul(&l.gram().to_rat()).to_int().expect("isometries are unimodular")
}

/// A finite group of isometries given by generators.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    lattice: Lattice,
    generators: Vec<IntMatrix>,
    order: Option<Int>,
}

impl MatrixGroup {
    pub fn new(lattice: Lattice, generators: Vec<IntMatrix>) -> Result<MatrixGroup> {
        for g in &generators {
            ensure_isometry(g, &lattice)?;
        }
        Ok(MatrixGroup { lattice, generators, order: None })
    }

    pub fn trivial(lattice: Lattice) -> MatrixGroup {
        MatrixGroup { lattice, generators: vec![], order: Some(Int::one()) }
    }

    pub(crate) fn with_order(lattice: Lattice, generators: Vec<IntMatrix>, order: Int) -> MatrixGroup {
        MatrixGroup { lattice, generators, order: Some(order) }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    /// All elements, sorted, by breadth-first closure under the generators.
    pub fn elements(&self, cap: usize) -> Result<Vec<IntMatrix>> {
        let n = self.lattice.rank();
        let id = IntMatrix::identity(n);
        let mut seen: BTreeSet<Vec<Vec<Int>>> = BTreeSet::from([id.rows_vec()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = g.mul(&x);
                if seen.insert(y.rows_vec()) {
                    if seen.len() > cap {
                        return Err(Error::EnumerationCapExceeded(cap));
                    }
                    queue.push_back(y);
                }
            }
        }
        Ok(seen.into_iter().map(|r| if n == 0 { IntMatrix::zeros(0, 0) } else { IntMatrix::from_rows(r) }).collect())
    }

    /// Exact order: cached when known, otherwise by enumeration.
    pub fn order(&self, cap: usize) -> Result<Int> {
        if let Some(o) = &self.order {
            return Ok(o.clone());
        }
        Ok(Int::from(self.elements(cap)?.len()))
    }

    /// `L^G`, primitive.
    pub fn invariant_sublattice(&self) -> Sublattice {
        invariant_sublattice(&self.generators, &self.lattice)
    }

    /// `L_G = (L^G)^⊥`.
    pub fn coinvariant_sublattice(&self) -> Sublattice {
        self.invariant_sublattice().orthogonal_complement()
    }

    /// Index of the first generator that is not stable, if any.
    pub fn first_unstable(&self) -> Result<Option<usize>> {
        let d = DiscriminantForm::new(&self.lattice)?;
        for (i, g) in self.generators.iter().enumerate() {
            if !d.action(g)?.is_identity() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Restriction to a `G`-invariant sublattice, in its basis.
    pub fn restrict(&self, s: &Sublattice) -> Result<MatrixGroup> {
        let l = s.as_lattice()?;
        let mut gens = Vec::new();
        for g in &self.generators {
            let r = s.restrict(g).ok_or_else(|| Error::Invalid("sublattice is not invariant".into()))?;
            if !r.is_identity() && !gens.contains(&r) {
                gens.push(r);
            }
        }
        MatrixGroup::new(l, gens)
    }
}

/// `L^G` for the group generated by `gens`: kernel of the stacked `g − 1`.
pub fn invariant_sublattice(gens: &[IntMatrix], l: &Lattice) -> Sublattice {
    let n = l.rank();
    if gens.is_empty() {
        return l.full();
    }
    let id = IntMatrix::identity(n);
    let mut stacked = gens[0].sub(&id);
    for g in &gens[1..] {
        stacked = stacked.vstack(&g.sub(&id));
    }
    let k = integer_kernel(&stacked);
    let basis = if k.nrows() == 0 { IntMatrix::zeros(0, n) } else { k };
    Sublattice::new(l.clone(), basis).expect("kernel basis is independent").canonical()
}

/// `O^#(L)` for a definite lattice, with exact order `|O(L)| / |image in O(D_L)|`.
pub fn stable_automorphism_group(l: &Lattice, opts: &AutomOptions) -> Result<MatrixGroup> {
    let full = automorphism_group_definite(l, opts)?;
    if l.rank() == 0 {
        return Ok(MatrixGroup::trivial(l.clone()));
    }
    let d = DiscriminantForm::new(l)?;
    let actions: Vec<DiscIsometry> =
        full.generators.iter().map(|g| d.action_unchecked(g)).collect::<Result<_>>()?;
    let id = DiscIsometry::identity(d.moduli());
    let n = l.rank();
    let mut reps: HashMap<DiscIsometry, IntMatrix> = HashMap::from([(id.clone(), IntMatrix::identity(n))]);
    let mut queue = VecDeque::from([id]);
    let mut kernel: Vec<IntMatrix> = Vec::new();
    while let Some(h) = queue.pop_front() {
        let rh = reps[&h].clone();
        for (s, a) in full.generators.iter().zip(&actions) {
            let h2 = a.compose(&h);
            let cand = s.mul(&rh);
            match reps.get(&h2) {
                Some(r2) => {
                    let k = isometry_inverse(r2, l).mul(&cand);
                    if !k.is_identity() && !kernel.contains(&k) {
                        kernel.push(k);
                    }
                }
                None => {
                    reps.insert(h2.clone(), cand);
                    queue.push_back(h2);
                }
            }
        }
    }
    let order = &full.order / Int::from(reps.len());
    kernel.sort_by_key(|m| m.rows_vec());
    Ok(MatrixGroup::with_order(l.clone(), kernel, order))
}

/// Outcome of the stable saturation test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub saturated: bool,
    /// Order of the image of `G` in `O(C)`.
    pub image_order: Int,
    /// Order of `O^#(C)`.
    pub stable_order: Int,
    pub coinvariant_rank: usize,
}

/// Stable saturation with respect to the coinvariant lattice `L_G`.
pub fn is_stably_saturated(g: &MatrixGroup, opts: &AutomOptions) -> Result<SaturationReport> {
    let c = g.coinvariant_sublattice();
    is_stably_saturated_relative(g, &c, opts)
}

/// Compares the image of `G` in `O(C)` with `O^#(C)` for a `G`-invariant
/// definite primitive sublattice `C` (normally `L_G`).
pub fn is_stably_saturated_relative(g: &MatrixGroup, c: &Sublattice, opts: &AutomOptions) -> Result<SaturationReport> {
    if let Some(i) = g.first_unstable()? {
        return Err(Error::NotStable(i));
    }
    let lc = c.as_lattice()?;
    lc.ensure_definite()?;
    let image = g.restrict(c)?;
    let dc = DiscriminantForm::new(&lc)?;
    let mut contained = true;
    for r in image.generators() {
        if !dc.action(r)?.is_identity() {
            contained = false;
        }
    }
    let image_order = image.order(DEFAULT_ELEMENT_CAP)?;
    let stable_order = stable_automorphism_group(&lc, opts)?.order(DEFAULT_ELEMENT_CAP)?;
    Ok(SaturationReport {
        saturated: contained && image_order == stable_order,
        image_order,
        stable_order,
        coinvariant_rank: c.rank(),
    })
}

/// `{g ∈ G : g|_{L^H} = id}`, the saturation of `H` in `G`.
pub fn pointwise_stabilizer(h: &MatrixGroup, g: &MatrixGroup, cap: usize) -> Result<MatrixGroup> {
    let fixed = h.invariant_sublattice();
    let elems = g.elements(cap)?;
    let basis = fixed.basis();
    let keep: Vec<IntMatrix> = elems
        .into_iter()
        .filter(|x| (0..basis.nrows()).all(|i| x.mul_vec(basis.row(i)) == basis.row(i)))
        .collect();
    let order = Int::from(keep.len());
    let gens = keep.into_iter().filter(|x| !x.is_identity()).collect();
    Ok(MatrixGroup::with_order(g.lattice().clone(), gens, order))
}
