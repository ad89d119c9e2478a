//! Even overlattices, primitive extensions by gluing discriminant forms, and
//! primitive embeddings up to the orthogonal group of the target.
//!
//! Embeddings into a definite target are found by enumerating images of a
//! basis among short vectors, then merged into orbits of `O(L)`. Embeddings
//! into an indefinite target are built as glued models `M ⊕ K ⊆ L'` with `L'`
//! in the genus of `L`: complements `K` come from a catalog of standard
//! lattices, and orbits are taken under the images of `O(M)` and `O(K)` in the
//! discriminant groups. The result is labeled `Exact` only when every step of
//! that correspondence is certified.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::autom::{automorphism_group_definite, is_isometric_definite, AutomOptions};
use crate::discform::{isometries_between, DiscIsometry, DiscriminantForm, Element, Subgroup, DEFAULT_GROUP_CAP};
use crate::error::{Error, Result};
use crate::genus::GenusSymbol;
use crate::lattice::{orthogonal_sum_index, Lattice, Sublattice};
use crate::matrix::{canonical_sign, gcd_slice, hermite_rows, Int, IntMatrix, Rat, RatMatrix};
use crate::shortvec::{primitive_vectors_of_type, short_vectors_all};
use crate::standard::{a, d, e8, hyperbolic_plane};

#[derive(Clone, Debug)]
pub struct EmbedOptions {
    pub group_cap: u128,
    /// Maximal number of raw embeddings enumerated into a definite target.
    pub embedding_cap: usize,
    /// Maximal rank of the root-lattice part of catalog complements.
    pub core_rank: usize,
    pub autom: AutomOptions,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions { group_cap: DEFAULT_GROUP_CAP, embedding_cap: 1_000_000, core_rank: 10, autom: AutomOptions::default() }
    }
}

/// An overlattice `L' ⊇ L` given by a rational basis in coordinates of `L`.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    /// Rows are the basis of `L'` in coordinates of `L`.
    pub basis: RatMatrix,
    pub index: Int,
    /// Elements of the isotropic subgroup `L'/L ⊆ D_L`.
    pub glue: Vec<Element>,
}

/// Glue data of a primitive extension: an anti-isometry between subgroups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub source: Subgroup,
    pub target: Subgroup,
    /// Graph of the map, sorted.
    pub pairs: Vec<(Element, Element)>,
}

#[derive(Clone, Debug)]
pub struct Extension {
    /// Overlattice of `L1 ⊕ L2`.
    pub overlattice: Overlattice,
    pub gluing: Gluing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Guarantee {
    /// Orbit representatives are complete and pairwise inequivalent.
    Exact,
    /// Each result is a genuine embedding; the list may miss orbits or repeat one.
    ExistenceOnly,
}

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    /// The target itself, or a glued model in its genus.
    pub ambient: Lattice,
    /// True when `ambient` is a glued model rather than the given target.
    pub glued_model: bool,
    pub image: Sublattice,
    pub complement: Sublattice,
    /// `[ambient : image ⊕ complement]`.
    pub glue_order: Int,
    pub guarantee: Guarantee,
}

pub fn isotropic_subgroups(d: &DiscriminantForm, cap: u128) -> Result<Vec<Subgroup>> {
    d.isotropic_subgroups(cap)
}

fn overlattice_from(l: &Lattice, extra: &[Vec<Rat>], glue: Vec<Element>) -> Result<Overlattice> {
    let n = l.rank();
    let mut den = Int::one();
    for v in extra {
        for x in v {
            den = den.lcm(x.denom());
        }
    }
    let mut rows = Vec::with_capacity(n + extra.len());
    for i in 0..n {
        let mut r = vec![Int::zero(); n];
        r[i] = den.clone();
        rows.push(r);
    }
    let dr = Rat::from_integer(den.clone());
    for v in extra {
        rows.push(v.iter().map(|x| (x * &dr).to_integer()).collect());
    }
    let h = hermite_rows(&IntMatrix::from_rows_with_cols(rows, n));
    let basis = RatMatrix::from_rows(
        h.rows_vec()
            .into_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| r.into_iter().map(|x| Rat::from_integer(x) / &dr).collect())
            .collect(),
    );
    let gram = basis.mul(&l.gram().to_rat()).mul(&basis.transpose()).to_int().ok_or(Error::NotIntegral)?;
    let index = (Rat::one() / basis.det()).abs().to_integer();
    Ok(Overlattice { lattice: Lattice::new(gram)?, basis, index, glue })
}

/// One overlattice per isotropic subgroup of `D_L`, the trivial one first.
pub fn even_overlattices(l: &Lattice, cap: u128) -> Result<Vec<Overlattice>> {
    l.ensure_even()?;
    let d = DiscriminantForm::new(l)?;
    let mut out = Vec::new();
    for h in d.isotropic_subgroups(cap)? {
        let extra: Vec<Vec<Rat>> = h.generators.iter().map(|x| d.to_vector(x)).collect();
        out.push(overlattice_from(l, &extra, h.elements.clone())?);
    }
    Ok(out)
}

/// All even overlattices of `L1 ⊕ L2` in which both summands are primitive.
pub fn primitive_extensions(l1: &Lattice, l2: &Lattice, cap: u128) -> Result<Vec<Extension>> {
    extensions_where(l1, l2, cap, |_| true)
}

fn extensions_where(l1: &Lattice, l2: &Lattice, cap: u128, order_ok: impl Fn(usize) -> bool) -> Result<Vec<Extension>> {
    l1.ensure_even()?;
    l2.ensure_even()?;
    let d1 = DiscriminantForm::new(l1)?;
    let d2 = DiscriminantForm::new(l2)?;
    let subs1 = d1.subgroups(cap)?;
    let subs2 = d2.subgroups(cap)?;
    let sum = l1.direct_sum(l2);
    let mut out = Vec::new();
    for h1 in subs1.iter().filter(|h| order_ok(h.order())) {
        for h2 in subs2.iter().filter(|h| h.order() == h1.order()) {
            for phi in isometries_between(&d1, h1, &d2, h2, -1) {
                out.push(glue(&d1, &d2, &sum, h1, h2, &phi)?);
            }
        }
    }
    Ok(out)
}

fn glue(
    d1: &DiscriminantForm,
    d2: &DiscriminantForm,
    sum: &Lattice,
    h1: &Subgroup,
    h2: &Subgroup,
    phi: &HashMap<Element, Element>,
) -> Result<Extension> {
    let mut pairs: Vec<(Element, Element)> = phi.iter().map(|(x, y)| (x.clone(), y.clone())).collect();
    pairs.sort();
    let extra: Vec<Vec<Rat>> = h1
        .generators
        .iter()
        .map(|x| {
            let mut v = d1.to_vector(x);
            v.extend(d2.to_vector(&phi[x]));
            v
        })
        .collect();
    let glue_elems = pairs.iter().map(|(x, y)| x.iter().chain(y).copied().collect()).collect();
    let overlattice = overlattice_from(sum, &extra, glue_elems)?;
    Ok(Extension { overlattice, gluing: Gluing { source: h1.clone(), target: h2.clone(), pairs } })
}

/// Sufficient criterion for `L` to be unique in its genus with
/// `O(L) → O(D_L)` surjective.
pub fn unique_in_genus(l: &Lattice) -> Result<bool> {
    let (p, q) = l.signature();
    if p == 0 || q == 0 {
        return Ok(false);
    }
    let len = DiscriminantForm::new(l)?.num_generators();
    Ok(if len == 0 { l.rank() >= 2 } else { l.rank() >= len + 3 })
}

/// Primitive sublattices of `L` isometric to `M`, up to `O(L)`.
pub fn primitive_embeddings(m: &Lattice, l: &Lattice, opts: &EmbedOptions) -> Result<Vec<EmbeddingResult>> {
    m.ensure_even()?;
    l.ensure_even()?;
    let (pm, qm) = m.signature();
    let (pl, ql) = l.signature();
    if m.rank() >= l.rank() {
        return Err(Error::SignatureObstruction(format!("rank {} does not embed into rank {}", m.rank(), l.rank())));
    }
    if pm > pl || qm > ql {
        return Err(Error::SignatureObstruction(format!("signature ({pm},{qm}) does not fit into ({pl},{ql})")));
    }
    if l.is_definite() {
        embeddings_definite(m, l, opts)
    } else {
        embeddings_glued(m, l, opts)
    }
}

fn embeddings_definite(m: &Lattice, l: &Lattice, opts: &EmbedOptions) -> Result<Vec<EmbeddingResult>> {
    let k = m.rank();
    let bound = (0..k).map(|i| m.gram()[(i, i)].abs()).max().unwrap_or_else(Int::zero);
    let vecs = short_vectors_all(l, &bound)?;
    let cand: Vec<Vec<usize>> =
        (0..k).map(|i| (0..vecs.len()).filter(|&j| l.square(&vecs[j]) == m.gram()[(i, i)]).collect()).collect();
    let mut images: BTreeSet<Vec<Vec<Int>>> = BTreeSet::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut leaves = 0usize;
    dfs(m, l, &vecs, &cand, &mut stack, &mut |chosen| {
        leaves += 1;
        let rows: Vec<Vec<Int>> = chosen.iter().map(|&j| vecs[j].clone()).collect();
        images.insert(hermite_rows(&IntMatrix::from_rows_with_cols(rows, l.rank())).rows_vec());
        leaves <= opts.embedding_cap
    });
    if leaves > opts.embedding_cap {
        return Err(Error::CapExceeded(format!("more than {} embeddings enumerated", opts.embedding_cap)));
    }
    let prim: BTreeSet<Vec<Vec<Int>>> = images
        .into_iter()
        .filter(|rows| Sublattice::new(l.clone(), IntMatrix::from_rows_with_cols(rows.clone(), l.rank())).unwrap().is_primitive())
        .collect();
    let gens = automorphism_group_definite(l, &opts.autom)?.generators;
    let mut seen: BTreeSet<Vec<Vec<Int>>> = BTreeSet::new();
    let mut out = Vec::new();
    for rep in &prim {
        if seen.contains(rep) {
            continue;
        }
        let mut queue = vec![rep.clone()];
        seen.insert(rep.clone());
        while let Some(s) = queue.pop() {
            let b = IntMatrix::from_rows_with_cols(s, l.rank());
            for g in &gens {
                let img = hermite_rows(&b.mul(&g.transpose())).rows_vec();
                if seen.insert(img.clone()) {
                    queue.push(img);
                }
            }
        }
        let image = Sublattice::new(l.clone(), IntMatrix::from_rows_with_cols(rep.clone(), l.rank()))?;
        let complement = image.orthogonal_complement();
        let glue_order = orthogonal_sum_index(&image, &complement);
        out.push(EmbeddingResult {
            ambient: l.clone(),
            glued_model: false,
            image,
            complement,
            glue_order,
            guarantee: Guarantee::Exact,
        });
    }
    Ok(out)
}

fn dfs(
    m: &Lattice,
    l: &Lattice,
    vecs: &[Vec<Int>],
    cand: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    leaf: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let level = chosen.len();
    if level == cand.len() {
        return leaf(chosen);
    }
    for &c in &cand[level] {
        let ok = chosen.iter().enumerate().all(|(i, &x)| l.product(&vecs[c], &vecs[x]) == m.gram()[(i, level)]);
        if ok {
            chosen.push(c);
            let go = dfs(m, l, vecs, cand, chosen, leaf);
            chosen.pop();
            if !go {
                return false;
            }
        }
    }
    true
}

/// Images of `O(X)` in `O(D_X)`, and whether they are the full image.
fn disc_image(x: &Lattice, d: &DiscriminantForm, opts: &EmbedOptions) -> Result<(Vec<DiscIsometry>, bool)> {
    if d.is_trivial() {
        return Ok((vec![], true));
    }
    if x.is_definite() {
        match automorphism_group_definite(x, &opts.autom) {
            Ok(data) => return Ok((data.generators.iter().map(|g| d.action(g)).collect::<Result<_>>()?, true)),
            Err(Error::RankCapExceeded { .. }) | Err(Error::TooLarge { .. }) => {}
            Err(e) => return Err(e),
        }
    } else if unique_in_genus(x)? {
        return Ok((d.orthogonal_group(opts.group_cap)?, true));
    }
    let minus = IntMatrix::identity(x.rank()).neg();
    Ok((vec![d.action(&minus)?], false))
}

fn embeddings_glued(m: &Lattice, l: &Lattice, opts: &EmbedOptions) -> Result<Vec<EmbeddingResult>> {
    let (pm, qm) = m.signature();
    let (pl, ql) = l.signature();
    let sig = (pl - pm, ql - qm);
    let target_genus = GenusSymbol::of(l)?;
    let dm = DiscriminantForm::new(m)?;
    let order_m = dm.order();
    let (det_l, det_m) = (l.det().abs(), m.det().abs());
    let mut glue_orders = Vec::new();
    let mut h = Int::one();
    while h <= order_m {
        if (&order_m % &h).is_zero() {
            let num = &det_l * &h * &h;
            if (&num % &det_m).is_zero() {
                glue_orders.push((h.clone(), num / &det_m));
            }
        }
        h += 1;
    }
    let l_exact = unique_in_genus(l)?;
    let (m_gens, m_exact) = disc_image(m, &dm, opts)?;
    let mut out = Vec::new();
    for (h, det_k) in glue_orders {
        let h_usize = usize::try_from(&h).map_err(|_| Error::Overflow)?;
        for (k, k_complete) in complement_catalog(sig, &det_k, opts)? {
            let exts = extensions_where(m, &k, opts.group_cap, |o| o == h_usize)?;
            let mut valid: BTreeMap<Vec<(Element, Element)>, Extension> = BTreeMap::new();
            for ext in exts {
                if GenusSymbol::of(&ext.overlattice.lattice)? == target_genus {
                    valid.insert(ext.gluing.pairs.clone(), ext);
                }
            }
            if valid.is_empty() {
                continue;
            }
            let dk = DiscriminantForm::new(&k)?;
            let (k_gens, k_exact) = disc_image(&k, &dk, opts)?;
            let exact = l_exact && m_exact && k_exact && k_complete;
            let acts: Vec<(DiscIsometry, DiscIsometry)> = m_gens
                .iter()
                .map(|g| (g.clone(), DiscIsometry::identity(dk.moduli())))
                .chain(k_gens.iter().map(|g| (DiscIsometry::identity(dm.moduli()), g.clone())))
                .collect();
            let mut seen: BTreeSet<Vec<(Element, Element)>> = BTreeSet::new();
            for (key, ext) in &valid {
                if seen.contains(key) {
                    continue;
                }
                seen.insert(key.clone());
                let mut queue = vec![key.clone()];
                while let Some(cur) = queue.pop() {
                    for (gm, gk) in &acts {
                        let mut img: Vec<(Element, Element)> = cur.iter().map(|(x, y)| (gm.apply(x), gk.apply(y))).collect();
                        img.sort();
                        if seen.insert(img.clone()) {
                            queue.push(img);
                        }
                    }
                }
                out.push(glued_result(m.rank(), ext, exact)?);
            }
        }
    }
    Ok(out)
}

fn glued_result(mrank: usize, ext: &Extension, exact: bool) -> Result<EmbeddingResult> {
    let ov = &ext.overlattice;
    let n = ov.lattice.rank();
    let c = ov.basis.inverse().ok_or(Error::Degenerate)?.to_int().ok_or(Error::NotIntegral)?;
    let image = Sublattice::new(ov.lattice.clone(), c.select_rows(&(0..mrank).collect::<Vec<_>>()))?;
    let complement = Sublattice::new(ov.lattice.clone(), c.select_rows(&(mrank..n).collect::<Vec<_>>()))?;
    Ok(EmbeddingResult {
        ambient: ov.lattice.clone(),
        glued_model: true,
        image,
        complement,
        glue_order: ov.index.clone(),
        guarantee: if exact { Guarantee::Exact } else { Guarantee::ExistenceOnly },
    })
}

/// Reduced positive definite even binary forms of determinant `det`, one per
/// isometry class.
pub fn binary_forms(det: &Int) -> Vec<Lattice> {
    let mut out = Vec::new();
    let mut aa = Int::from(2);
    // a² ≤ 4 det / 3 for reduced forms
    while Int::from(3) * &aa * &aa <= Int::from(4) * det {
        let mut b = Int::zero();
        while Int::from(2) * &b <= aa {
            let num = det + &b * &b;
            if (&num % &aa).is_zero() {
                let c = &num / &aa;
                if c >= aa && c.is_even() {
                    out.push(Lattice::new(IntMatrix::from_rows(vec![vec![aa.clone(), b.clone()], vec![b.clone(), c]])).unwrap());
                }
            }
            b += 1;
        }
        aa += 2;
    }
    out
}

struct Component {
    rank: usize,
    det: Int,
    lattice: Lattice,
}

fn root_components(max_rank: usize) -> Vec<Component> {
    let mut out = Vec::new();
    for n in 1..=max_rank {
        out.push(Component { rank: n, det: Int::from(n + 1), lattice: a(n).unwrap() });
    }
    for n in 4..=max_rank {
        out.push(Component { rank: n, det: Int::from(4), lattice: d(n).unwrap() });
    }
    for n in [6usize, 7] {
        if n <= max_rank {
            out.push(Component { rank: n, det: Int::from(9 - n), lattice: crate::standard::e(n).unwrap() });
        }
    }
    out
}

/// Negative definite root lattices of the given rank with `det | bound`.
fn root_sums(comps: &[Component], rank: usize, bound: &Int) -> Vec<(Lattice, Int)> {
    fn rec(comps: &[Component], start: usize, rank: usize, det: Int, acc: Lattice, bound: &Int, out: &mut Vec<(Lattice, Int)>) {
        if rank == 0 {
            out.push((acc, det));
            return;
        }
        for (i, c) in comps.iter().enumerate().skip(start) {
            if c.rank > rank {
                continue;
            }
            let nd = &det * &c.det;
            if !(bound % &nd).is_zero() {
                continue;
            }
            rec(comps, i, rank - c.rank, nd, acc.direct_sum(&c.lattice), bound, out);
        }
    }
    let mut out = Vec::new();
    rec(comps, 0, rank, Int::one(), Lattice::zero(), bound, &mut out);
    out
}

fn with_sign(l: &Lattice, positive: bool) -> Lattice {
    if positive {
        l.negated()
    } else {
        l.clone()
    }
}

/// Candidate complements of signature `sig` and `|det| = det`, with a flag
/// telling whether the list provably covers every class of each genus.
pub fn complement_catalog(sig: (usize, usize), det: &Int, opts: &EmbedOptions) -> Result<Vec<(Lattice, bool)>> {
    let (p, q) = sig;
    let rank = p + q;
    if rank == 0 || det.is_zero() {
        return Ok(vec![]);
    }
    let definite = p == 0 || q == 0;
    if definite && rank <= 2 {
        let forms = if rank == 1 {
            if det.is_even() {
                vec![Lattice::new(IntMatrix::from_rows(vec![vec![det.clone()]]))?]
            } else {
                vec![]
            }
        } else {
            binary_forms(det)
        };
        return Ok(forms.iter().map(|f| (with_sign(&f.negated(), p > 0), true)).collect());
    }

    // twists: extra summand of small rank with its signature and determinant
    let mut twists: Vec<(Lattice, usize, usize)> = vec![(Lattice::zero(), 0, 0)];
    for t in divisors(det) {
        if t.is_even() {
            let r1 = Lattice::new(IntMatrix::from_rows(vec![vec![t.clone()]]))?;
            twists.push((r1.clone(), 1, 0));
            twists.push((r1.negated(), 0, 1));
        }
        for f in binary_forms(&t) {
            twists.push((f.clone(), 2, 0));
            twists.push((f.negated(), 0, 2));
        }
        let k = t.sqrt();
        if &k * &k == t && k > Int::one() {
            twists.push((hyperbolic_plane().rescale(i64::try_from(&k).map_err(|_| Error::Overflow)?)?, 1, 1));
        }
    }
    let comps = root_components(opts.core_rank);
    let mut raw: Vec<Lattice> = Vec::new();
    for (t, tp, tq) in &twists {
        if *tp > p || *tq > q {
            continue;
        }
        let tdet = t.det().abs();
        let tdet = if t.rank() == 0 { Int::one() } else { tdet };
        if !(det % &tdet).is_zero() {
            continue;
        }
        let rest = det / &tdet;
        for u in 0..=(p - tp).min(q - tq) {
            let (rp, rq) = (p - tp - u, q - tq - u);
            if rp > 0 && rq > 0 {
                continue;
            }
            let positive = rp > 0;
            let drank = rp + rq;
            let mut base = Lattice::zero();
            for _ in 0..u {
                base = base.direct_sum(&hyperbolic_plane());
            }
            base = base.direct_sum(t);
            for ne in 0..=drank / 8 {
                let core = drank - 8 * ne;
                if core > opts.core_rank {
                    continue;
                }
                let mut b2 = base.clone();
                for _ in 0..ne {
                    b2 = b2.direct_sum(&with_sign(&e8(), positive));
                }
                for (r, rdet) in root_sums(&comps, core, &rest) {
                    if rdet == rest {
                        raw.push(b2.direct_sum(&with_sign(&r, positive)));
                    }
                }
            }
        }
    }
    let mut out: Vec<(Lattice, bool)> = Vec::new();
    let mut genera: Vec<GenusSymbol> = Vec::new();
    for k in raw {
        if k.signature() != sig || !k.is_even() {
            continue;
        }
        let g = GenusSymbol::of(&k)?;
        if definite {
            let dup = out.iter().zip(&genera).any(|((o, _), og)| {
                *og == g && matches!(is_isometric_definite(o, &k, &opts.autom), Ok(Some(_)))
            });
            if !dup {
                out.push((k, false));
                genera.push(g);
            }
        } else if !genera.contains(&g) {
            let unique = unique_in_genus(&k)?;
            out.push((k, unique));
            genera.push(g);
        }
    }
    Ok(out)
}

fn divisors(n: &Int) -> Vec<Int> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = Int::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            let j = &n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out.sort();
    out
}

/// A primitive vector of prescribed type in an invariant lattice, with its
/// orthogonal complement there.
#[derive(Clone, Debug)]
pub struct InvariantVector {
    pub vector: Vec<Int>,
    /// `v^⊥ ∩ Lfix`, in ambient coordinates.
    pub complement: Sublattice,
}

/// Primitive `v ∈ Lfix` with `v² = square` and `div(v, L) = gamma`, one per
/// `±` pair. Indefinite `Lfix` requires a coordinate box bound.
pub fn invariant_vector_orbits(
    lfix: &Sublattice,
    square: &Int,
    gamma: &Int,
    box_bound: Option<u64>,
) -> Result<Vec<InvariantVector>> {
    let lat = lfix.as_lattice()?;
    let l = lfix.ambient();
    let vectors = if lat.rank() == 0 || lat.is_definite() {
        primitive_vectors_of_type(lfix, square, gamma)?
    } else {
        let b = box_bound.ok_or(Error::NotDefinite)?;
        let k = lfix.rank();
        let count = (2 * b as u128 + 1).checked_pow(k as u32).unwrap_or(u128::MAX);
        if count > 50_000_000 {
            return Err(Error::CapExceeded(format!("coordinate box of {count} points")));
        }
        let mut found = Vec::new();
        let mut c = vec![-(b as i64); k];
        loop {
            let ci: Vec<Int> = c.iter().map(|&x| Int::from(x)).collect();
            if lat.square(&ci) == *square {
                let v = lfix.to_ambient(&ci);
                if canonical_sign(&v) == v && gcd_slice(&v).is_one() && &l.divisibility(&v)? == gamma {
                    found.push(v);
                }
            }
            let mut i = 0;
            while i < k && c[i] == b as i64 {
                c[i] = -(b as i64);
                i += 1;
            }
            if i == k {
                break;
            }
            c[i] += 1;
        }
        found.sort();
        found
    };
    let mut out = Vec::new();
    for v in vectors {
        let c = lfix.coordinates(&v).ok_or(Error::Invalid("vector outside the sublattice".into()))?;
        let inner = Sublattice::new(lat.clone(), IntMatrix::from_rows(vec![c]))?.orthogonal_complement();
        let rows = if inner.rank() == 0 { IntMatrix::zeros(0, l.rank()) } else { inner.basis().mul(lfix.basis()) };
        out.push(InvariantVector { vector: v, complement: Sublattice::new(l.clone(), rows)? });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{k3n, rank_one};

    fn lat(rows: &[[i64; 2]]) -> Lattice {
        Lattice::from_i64(rows).unwrap()
    }

    #[test]
    fn isotropic_subgroup_examples() {
        let d = DiscriminantForm::new(&lat(&[[2, 0], [0, -2]])).unwrap();
        assert_eq!(isotropic_subgroups(&d, DEFAULT_GROUP_CAP).unwrap().len(), 2);
        let d = DiscriminantForm::new(&rank_one(-4).unwrap()).unwrap();
        assert_eq!(isotropic_subgroups(&d, DEFAULT_GROUP_CAP).unwrap().len(), 1);
    }

    #[test]
    fn overlattices_of_ns_fixture() {
        let ov = even_overlattices(&lat(&[[4, 0], [0, -12]]), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(ov.len(), 2);
        let proper = &ov[1];
        assert_eq!(proper.index, Int::from(2));
        assert!(crate::genus::same_genus(&proper.lattice, &lat(&[[4, 2], [2, -2]])).unwrap());
        let none = even_overlattices(&lat(&[[4, 2], [2, -2]]), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(none.len(), 1);
        let u = even_overlattices(&lat(&[[2, 0], [0, -2]]), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!(u[1].lattice.det(), &Int::from(-1));
    }

    #[test]
    fn extension_counts() {
        let e = primitive_extensions(&rank_one(2).unwrap(), &rank_one(-2).unwrap(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(e.len(), 2);
        let e = primitive_extensions(&e8(), &rank_one(-2).unwrap(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(e.len(), 1);
        let e = primitive_extensions(&rank_one(-4).unwrap(), &rank_one(4).unwrap(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(e.iter().filter(|x| x.overlattice.index == Int::from(4)).count(), 2);
        for x in &e {
            assert!(x.overlattice.lattice.is_even());
        }
    }

    #[test]
    fn root_into_u_and_e8() {
        let opts = EmbedOptions::default();
        let r = primitive_embeddings(&rank_one(-2).unwrap(), &hyperbolic_plane(), &opts).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].guarantee, Guarantee::Exact);
        let r = primitive_embeddings(&rank_one(-2).unwrap(), &e8(), &opts).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].complement.rank(), 7);
        assert_eq!(r[0].complement.as_lattice().unwrap().det().abs(), Int::from(2));
    }

    #[test]
    fn ns_into_k3_cube() {
        let m = lat(&[[4, 2], [2, -2]]);
        let r = primitive_embeddings(&m, &k3n(3).unwrap(), &EmbedOptions::default()).unwrap();
        assert!(!r.is_empty());
        for x in &r {
            assert!(x.image.is_primitive());
            assert_eq!(x.image.gram(), *m.gram());
        }
        let expected = crate::standard::standard_lattice("U^2 + A2 + D7 + E8").unwrap();
        let g = GenusSymbol::of(&expected).unwrap();
        assert!(r.iter().any(|x| GenusSymbol::of(&x.complement.as_lattice().unwrap()).unwrap() == g));
    }

    #[test]
    fn invariant_vectors() {
        let u = hyperbolic_plane();
        let found = invariant_vector_orbits(&u.full(), &Int::from(4), &Int::one(), Some(5)).unwrap();
        let vs: Vec<Vec<Int>> = found.iter().map(|x| x.vector.clone()).collect();
        assert_eq!(vs, vec![vec![Int::from(1), Int::from(2)], vec![Int::from(2), Int::from(1)]]);
        let h = rank_one(4).unwrap().direct_sum(&rank_one(-2).unwrap());
        let s = h.sublattice_i64(&[[1, 0]]).unwrap();
        let found = invariant_vector_orbits(&s, &Int::from(4), &Int::from(4), None).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].complement.rank(), 0);
    }
}
