//! Lattice computations for hyperkähler manifolds of K3^[n] type: the BBF
//! lattice, wall divisor screening of coinvariant lattices, symplectic tests,
//! and the Leech pair classification pipeline.

use num_traits::{One, Zero};

use crate::discform::is_stable;
use crate::embed::{invariant_vector_orbits, primitive_embeddings, EmbedOptions, EmbeddingResult, Guarantee};
use crate::error::{Error, Result};
use crate::isom::{is_isometry, stable_automorphism_group, MatrixGroup, DEFAULT_ELEMENT_CAP};
use crate::lattice::{Lattice, Sublattice, VectorType};
use crate::matrix::{Int, IntMatrix, RatMatrix};
use crate::padic::contains_rescaled_u_necessary_condition;
use crate::shortvec::primitive_vectors_of_type;
use crate::standard::{k3n, mukai};

/// Vector types of prime exceptional divisors and of all wall divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallSpec {
    pub pex_types: Vec<VectorType>,
    /// Contains `pex_types`.
    pub wall_types: Vec<VectorType>,
}

impl WallSpec {
    pub fn new(pex_types: Vec<VectorType>, extra_wall_types: Vec<VectorType>) -> Result<WallSpec> {
        for t in pex_types.iter().chain(&extra_wall_types) {
            let two = Int::from(2);
            if t.square >= Int::zero() || &t.square % &two != Int::zero() {
                return Err(Error::Invalid(format!("wall type {t} must have negative even square")));
            }
        }
        let mut wall_types = pex_types.clone();
        for t in extra_wall_types {
            if !wall_types.contains(&t) {
                wall_types.push(t);
            }
        }
        Ok(WallSpec { pex_types, wall_types })
    }

    /// Types for K3^[3]: pex `(−2,1), (−4,2), (−4,4)`, walls add `(−12,2), (−36,4)`.
    pub fn k3n3() -> WallSpec {
        WallSpec::new(
            vec![VectorType::new(-2, 1), VectorType::new(-4, 2), VectorType::new(-4, 4)],
            vec![VectorType::new(-12, 2), VectorType::new(-36, 4)],
        )
        .unwrap()
    }

    pub fn for_n(n: i64) -> Result<WallSpec> {
        match n {
            3 => Ok(WallSpec::k3n3()),
            _ => Err(Error::BadN(n)),
        }
    }
}

/// `U³ ⊕ E8² ⊕ [−2(n−1)]`.
pub fn k3n_lattice(n: i64) -> Result<Lattice> {
    k3n(n)
}

pub fn mukai_lattice() -> Lattice {
    mukai()
}

/// Number of `±` pairs of primitive vectors of one type, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeCount {
    pub vector_type: VectorType,
    pub pairs: usize,
    pub witness: Option<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScreeningReport {
    pub free: bool,
    /// First vector found, with its type (divisibility in the ambient lattice).
    pub witness: Option<(Vec<Int>, VectorType)>,
    pub counts: Vec<TypeCount>,
}

/// Enumerates primitive vectors of `C` of the given types.
pub fn screen(c: &Sublattice, types: &[VectorType]) -> Result<ScreeningReport> {
    let lc = c.as_lattice()?;
    if lc.rank() > 0 && !lc.is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    let mut counts = Vec::new();
    let mut witness = None;
    for t in types {
        let found = if lc.rank() == 0 { vec![] } else { primitive_vectors_of_type(c, &t.square, &t.divisibility)? };
        if witness.is_none() {
            if let Some(v) = found.first() {
                witness = Some((v.clone(), t.clone()));
            }
        }
        counts.push(TypeCount { vector_type: t.clone(), pairs: found.len(), witness: found.into_iter().next() });
    }
    Ok(ScreeningReport { free: witness.is_none(), witness, counts })
}

pub fn is_pex_free(c: &Sublattice, spec: &WallSpec) -> Result<ScreeningReport> {
    screen(c, &spec.pex_types)
}

pub fn is_wall_free(c: &Sublattice, spec: &WallSpec) -> Result<ScreeningReport> {
    screen(c, &spec.wall_types)
}

#[derive(Clone, Debug)]
pub struct SymplecticReport {
    pub stable: bool,
    pub neg_def_coinv: bool,
    /// `None` when the coinvariant lattice is not negative definite.
    pub pex: Option<ScreeningReport>,
    pub wall: Option<ScreeningReport>,
    pub symplectic: bool,
    pub coinvariant: Sublattice,
}

pub fn symplectic_check(g: &MatrixGroup, spec: &WallSpec) -> Result<SymplecticReport> {
    let coinvariant = g.coinvariant_sublattice();
    let stable = g.first_unstable()?.is_none();
    let lc = coinvariant.as_lattice()?;
    let neg_def_coinv = lc.rank() == 0 || lc.is_negative_definite();
    let (pex, wall) = if neg_def_coinv {
        (Some(is_pex_free(&coinvariant, spec)?), Some(is_wall_free(&coinvariant, spec)?))
    } else {
        (None, None)
    };
    let symplectic = neg_def_coinv && pex.as_ref().is_some_and(|r| r.free);
    Ok(SymplecticReport { stable, neg_def_coinv, pex, wall, symplectic, coinvariant })
}

/// A candidate coinvariant lattice with a finite group acting on it.
#[derive(Clone, Debug)]
pub struct LeechPairInput {
    pub group: MatrixGroup,
    pub label: String,
}

impl LeechPairInput {
    pub fn new(gram: Lattice, generators: Vec<IntMatrix>, label: impl Into<String>) -> Result<LeechPairInput> {
        if gram.rank() > 0 && !gram.is_negative_definite() {
            return Err(Error::NotNegativeDefinite);
        }
        let group = MatrixGroup::new(gram, generators)?;
        if group.invariant_sublattice().rank() > 0 {
            return Err(Error::Invalid("the group fixes a nonzero vector of the coinvariant lattice".into()));
        }
        Ok(LeechPairInput { group, label: label.into() })
    }

    pub fn lattice(&self) -> &Lattice {
        self.group.lattice()
    }
}

#[derive(Clone, Debug)]
pub struct ClassifiedEmbedding {
    pub embedding: EmbeddingResult,
    pub pex: ScreeningReport,
    pub wall: ScreeningReport,
    /// Generators on the ambient lattice: `O^#(C)` on `C`, identity on `C^⊥`.
    pub extended_generators: Vec<IntMatrix>,
    pub extended_order: Int,
    /// Every extended generator is a stable isometry fixing `C^⊥` pointwise.
    pub stable_certificate: bool,
    /// Order of the input group; equality with `extended_order` means saturated.
    pub input_order: Int,
}

/// Extends `g` (acting on `C` in its basis) by the identity on `C^⊥`.
pub fn extend_by_identity(g: &IntMatrix, c: &Sublattice, perp: &Sublattice) -> Result<IntMatrix> {
    let n = c.ambient().rank();
    let p = c.basis().vstack(perp.basis());
    if p.nrows() != n {
        return Err(Error::Invalid("C ⊕ C^⊥ does not have full rank".into()));
    }
    let block = g.direct_sum(&IntMatrix::identity(perp.rank()));
    let pt = p.transpose().to_rat();
    let inv: RatMatrix = pt.inverse().ok_or(Error::Degenerate)?;
    pt.mul(&block.to_rat()).mul(&inv).to_int().ok_or(Error::NotIntegral)
}

/// Embeds `C` primitively into `ambient`, screens each orbit for wall
/// divisors, and builds the group `O^#(C) × {id}` with its stability check.
pub fn classify_leech_pair(
    input: &LeechPairInput,
    ambient: &Lattice,
    spec: &WallSpec,
    opts: &EmbedOptions,
) -> Result<Vec<ClassifiedEmbedding>> {
    let c = input.lattice();
    let input_order = input.group.order(DEFAULT_ELEMENT_CAP)?;
    let embeddings = if c.rank() == 0 {
        let n = ambient.rank();
        vec![EmbeddingResult {
            ambient: ambient.clone(),
            glued_model: false,
            image: Sublattice::new(ambient.clone(), IntMatrix::zeros(0, n))?,
            complement: ambient.full(),
            glue_order: Int::one(),
            guarantee: Guarantee::Exact,
        }]
    } else {
        primitive_embeddings(c, ambient, opts)?
    };
    let mut out = Vec::new();
    for emb in embeddings {
        let pex = is_pex_free(&emb.image, spec)?;
        let wall = is_wall_free(&emb.image, spec)?;
        let (gens, order) = if emb.image.rank() == 0 {
            (vec![], Int::one())
        } else {
            let stable = stable_automorphism_group(&emb.image.as_lattice()?, &opts.autom)?;
            let order = stable.order(DEFAULT_ELEMENT_CAP)?;
            let gens = stable
                .generators()
                .iter()
                .map(|g| extend_by_identity(g, &emb.image, &emb.complement))
                .collect::<Result<Vec<_>>>()?;
            (gens, order)
        };
        let mut cert = true;
        for g in &gens {
            let fixes = (0..emb.complement.rank()).all(|i| g.mul_vec(emb.complement.basis().row(i)) == emb.complement.basis().row(i));
            cert &= fixes && is_isometry(g, &emb.ambient)? && is_stable(g, &emb.ambient)?;
        }
        out.push(ClassifiedEmbedding {
            embedding: emb,
            pex,
            wall,
            extended_generators: gens,
            extended_order: order,
            stable_certificate: cert,
            input_order: input_order.clone(),
        });
    }
    Ok(out)
}

/// A polarization class in the invariant lattice with its transcendental lattice.
#[derive(Clone, Debug)]
pub struct PolarizedEntry {
    /// Index into the classified embeddings.
    pub embedding: usize,
    pub vector: Vec<Int>,
    /// Gram of `H^⊥ ∩ L^G`.
    pub transcendental: Lattice,
}

/// For each classified embedding, the vectors of type `(square, div)` in
/// `L^G = C^⊥` and their orthogonal complements there.
pub fn polarized_report(
    results: &[ClassifiedEmbedding],
    pol_type: &VectorType,
    box_bound: u64,
) -> Result<Vec<PolarizedEntry>> {
    let mut out = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let fixed = &r.embedding.complement;
        if fixed.rank() > 4 {
            return Err(Error::CapExceeded(format!("invariant lattice of rank {} (at most 4 supported)", fixed.rank())));
        }
        for iv in invariant_vector_orbits(fixed, &pol_type.square, &pol_type.divisibility, Some(box_bound))? {
            out.push(PolarizedEntry { embedding: i, vector: iv.vector, transcendental: iv.complement.as_lattice()? });
        }
    }
    Ok(out)
}

/// `true` when `N` cannot contain any `U(k)`: some completion is anisotropic.
pub fn twisted_moduli_obstruction(n: &Lattice) -> Result<bool> {
    Ok(!contains_rescaled_u_necessary_condition(n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autom::AutomOptions;
    use crate::discform::DiscriminantForm;
    use crate::isom::reflection;
    use crate::matrix::ivec;
    use crate::standard::a;

    fn unit(n: usize, i: usize, x: i64) -> Vec<i64> {
        let mut v = vec![0; n];
        v[i] = x;
        v
    }

    #[test]
    fn k3_cube_lattice() {
        let l = k3n_lattice(3).unwrap();
        assert_eq!(l.rank(), 23);
        assert_eq!(l.signature(), (3, 20));
        assert_eq!(l.gram()[(22, 22)], Int::from(-4));
        assert_eq!(k3n_lattice(2).unwrap().gram()[(22, 22)], Int::from(-2));
        assert!(matches!(k3n_lattice(1), Err(Error::BadN(1))));
        let d = DiscriminantForm::new(&l).unwrap();
        assert_eq!(crate::discform::count_elements_of_order(&d, 2, 100).unwrap(), 1);
    }

    #[test]
    fn screening_examples() {
        let l = k3n_lattice(3).unwrap();
        let spec = WallSpec::k3n3();
        let w = l.sublattice_i64(&[unit(23, 22, 1)]).unwrap();
        let r = is_pex_free(&w, &spec).unwrap();
        assert!(!r.free);
        assert_eq!(r.witness.unwrap().1, VectorType::new(-4, 4));
        let mut root = unit(23, 0, 1);
        root[1] = -1;
        let r = is_pex_free(&l.sublattice_i64(&[root]).unwrap(), &spec).unwrap();
        assert_eq!(r.witness.unwrap().1, VectorType::new(-2, 1));
        let zero = Sublattice::new(l.clone(), IntMatrix::zeros(0, 23)).unwrap();
        assert!(is_pex_free(&zero, &spec).unwrap().free);
        assert!(is_wall_free(&zero, &spec).unwrap().free);
        // 2(e − f) + w has type (−12, 2) and spans a pex-free line
        let mut v = unit(23, 22, 1);
        v[0] = 2;
        v[1] = -2;
        let c = l.sublattice_i64(&[v]).unwrap();
        assert!(is_pex_free(&c, &spec).unwrap().free);
        let wr = is_wall_free(&c, &spec).unwrap();
        assert!(!wr.free);
        assert_eq!(wr.witness.unwrap().1, VectorType::new(-12, 2));
    }

    #[test]
    fn symplectic_examples() {
        let l = k3n_lattice(3).unwrap();
        let spec = WallSpec::k3n3();
        let triv = symplectic_check(&MatrixGroup::trivial(l.clone()), &spec).unwrap();
        assert!(triv.symplectic && triv.stable);
        let mut root = vec![0i64; 23];
        root[0] = 1;
        root[1] = -1;
        let g = reflection(&ivec(&root), &l).unwrap();
        let r = symplectic_check(&MatrixGroup::new(l.clone(), vec![g]).unwrap(), &spec).unwrap();
        assert!(r.neg_def_coinv && r.stable && !r.pex.unwrap().free);
        let mut m = IntMatrix::identity(23);
        m[(22, 22)] = Int::from(-1);
        let r = symplectic_check(&MatrixGroup::new(l, vec![m]).unwrap(), &spec).unwrap();
        assert!(!r.stable && !r.pex.unwrap().free);
    }

    #[test]
    fn leech_pair_a2() {
        let a2 = a(2).unwrap();
        let stable = stable_automorphism_group(&a2, &AutomOptions::default()).unwrap();
        let input = LeechPairInput::new(a2, stable.generators().to_vec(), "A2").unwrap();
        let res = classify_leech_pair(&input, &k3n_lattice(3).unwrap(), &WallSpec::k3n3(), &EmbedOptions::default()).unwrap();
        assert!(!res.is_empty());
        for r in &res {
            assert!(r.stable_certificate);
            assert!(!r.pex.free);
        }
    }

    #[test]
    fn leech_pair_minus_four() {
        let c = Lattice::from_i64(&[[-4]]).unwrap();
        let input = LeechPairInput::new(c, vec![IntMatrix::from_i64(&[[-1]])], "[-4]").unwrap();
        let res = classify_leech_pair(&input, &k3n_lattice(3).unwrap(), &WallSpec::k3n3(), &EmbedOptions::default()).unwrap();
        assert!(res.iter().any(|r| r.pex.witness.as_ref().is_some_and(|w| w.1 == VectorType::new(-4, 4))));
        let empty = LeechPairInput::new(Lattice::zero(), vec![], "trivial").unwrap();
        let res = classify_leech_pair(&empty, &k3n_lattice(3).unwrap(), &WallSpec::k3n3(), &EmbedOptions::default()).unwrap();
        assert_eq!(res.len(), 1);
        assert!(res[0].pex.free);
    }

    #[test]
    fn mukai_and_twisted() {
        let m = mukai_lattice();
        assert_eq!(m.rank(), 24);
        assert_eq!(m.signature(), (4, 20));
        assert!(m.det().is_one());
        let r = primitive_embeddings(&k3n_lattice(3).unwrap(), &m, &EmbedOptions::default()).unwrap();
        assert!(r.iter().any(|x| x.complement.gram() == IntMatrix::from_i64(&[[4]])));
        let n = Lattice::from_i64(&[[4, 2, -2], [2, -2, -1], [-2, -1, 2]]).unwrap();
        assert!(twisted_moduli_obstruction(&n).unwrap());
        let d = Lattice::from_i64(&[[2, 0, 0], [0, -2, 0], [0, 0, 6]]).unwrap();
        assert!(!twisted_moduli_obstruction(&d).unwrap());
    }

    #[test]
    fn polarized_rank_one() {
        let l = Lattice::from_i64(&[[4, 0], [0, -4]]).unwrap();
        let c = l.sublattice_i64(&[[0, 1]]).unwrap();
        let emb = EmbeddingResult {
            ambient: l.clone(),
            glued_model: false,
            image: c.clone(),
            complement: c.orthogonal_complement(),
            glue_order: Int::from(1),
            guarantee: Guarantee::Exact,
        };
        let ce = ClassifiedEmbedding {
            embedding: emb,
            pex: screen(&c, &[]).unwrap(),
            wall: screen(&c, &[]).unwrap(),
            extended_generators: vec![],
            extended_order: Int::one(),
            stable_certificate: true,
            input_order: Int::one(),
        };
        let r = polarized_report(std::slice::from_ref(&ce), &VectorType::new(4, 4), 3).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].transcendental.rank(), 0);
        assert!(polarized_report(&[ce], &VectorType::new(4, 2), 3).unwrap().is_empty());
    }
}
