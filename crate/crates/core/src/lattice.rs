//! Lattices given by integral Gram matrices, and sublattices expressed in
//! ambient coordinates.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{dot, gcd_slice, hermite_rows, integer_kernel, saturate_rows, Int, IntMatrix, Rat, RatMatrix};

/// Congruence diagonalization over `Q`: returns `d` such that the form is
/// `Q`-equivalent to `diag(d)`. Zero entries appear only for degenerate input.
pub fn rational_diagonal(gram: &IntMatrix) -> Vec<Rat> {
    rational_diagonal_rat(&gram.to_rat())
}

pub fn rational_diagonal_rat(gram: &RatMatrix) -> Vec<Rat> {
    let n = gram.nrows();
    let mut a = gram.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if a[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                swap_sym(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                // e_k <- e_k + e_j turns the diagonal entry into 2 a_kj
                for i in 0..n {
                    let v = a[(j, i)].clone();
                    a[(k, i)] += v;
                }
                for i in 0..n {
                    let v = a[(i, j)].clone();
                    a[(i, k)] += v;
                }
            }
        }
        let piv = a[(k, k)].clone();
        out.push(piv.clone());
        if piv.is_zero() {
            continue;
        }
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = &a[(i, k)] / &piv;
            for j in k..n {
                let v = &a[(k, j)] * &f;
                a[(i, j)] -= v;
            }
            for j in k..n {
                let v = &a[(j, k)] * &f;
                a[(j, i)] -= v;
            }
        }
    }
    out
}

fn swap_sym(a: &mut RatMatrix, i: usize, j: usize) {
    a.swap_rows(i, j);
    let n = a.ncols();
    for r in 0..a.nrows() {
        let t = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = t;
    }
    let _ = n;
}

/// A nondegenerate integral lattice given by its Gram matrix.
///
/// Rank 0 is allowed (the zero lattice, determinant 1); it shows up as the
/// coinvariant lattice of a trivial group and as complements of full-rank
/// sublattices.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    even: bool,
    signature: (usize, usize),
    det: Int,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({:?})", self.gram)
    }
}

impl Lattice {
    /// Validates a Gram matrix: square, symmetric and nondegenerate.
    pub fn new(gram: IntMatrix) -> Result<Lattice> {
        if !gram.is_square() {
            return Err(Error::NotSquare { rows: gram.nrows(), cols: gram.ncols() });
        }
        if !gram.is_symmetric() {
            return Err(Error::NonSymmetric);
        }
        let det = gram.det();
        if det.is_zero() {
            return Err(Error::Degenerate);
        }
        let diag = rational_diagonal(&gram);
        let pos = diag.iter().filter(|d| d.is_positive()).count();
        let neg = diag.iter().filter(|d| d.is_negative()).count();
        debug_assert_eq!(pos + neg, gram.nrows());
        let even = (0..gram.nrows()).all(|i| gram[(i, i)].is_even());
        Ok(Lattice { gram, even, signature: (pos, neg), det })
    }

    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Result<Lattice> {
        Lattice::new(IntMatrix::from_i64(rows))
    }

    /// The zero lattice.
    pub fn zero() -> Lattice {
        Lattice { gram: IntMatrix::zeros(0, 0), even: true, signature: (0, 0), det: Int::one() }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// `(positive, negative)` inertia indices.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn det(&self) -> &Int {
        &self.det
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature.0 == 0
    }

    pub fn is_definite(&self) -> bool {
        self.is_positive_definite() || self.is_negative_definite()
    }

    pub fn ensure_even(&self) -> Result<()> {
        if self.even {
            Ok(())
        } else {
            Err(Error::NotEven)
        }
    }

    pub fn ensure_definite(&self) -> Result<()> {
        if self.is_definite() {
            Ok(())
        } else {
            Err(Error::NotDefinite)
        }
    }

    pub fn check_vector(&self, v: &[Int]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::SizeMismatch { expected: self.rank(), got: v.len() });
        }
        Ok(())
    }

    /// Bilinear form `b(u, v)`.
    pub fn product(&self, u: &[Int], v: &[Int]) -> Int {
        dot(u, &self.gram.mul_vec(v))
    }

    pub fn square(&self, v: &[Int]) -> Int {
        self.product(v, v)
    }

    pub fn rat_product(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let gv = self.gram.to_rat().mul_vec(v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice {
            gram: self.gram.direct_sum(&other.gram),
            even: self.even && other.even,
            signature: (self.signature.0 + other.signature.0, self.signature.1 + other.signature.1),
            det: &self.det * &other.det,
        }
    }

    /// The rescaled lattice `L(k)` with form `k * b`.
    pub fn rescale(&self, k: i64) -> Result<Lattice> {
        if k == 0 {
            return Err(Error::Degenerate);
        }
        Lattice::new(self.gram.scale(&Int::from(k)))
    }

    /// `L` with its form negated.
    pub fn negated(&self) -> Lattice {
        let n = self.rank();
        Lattice {
            gram: self.gram.neg(),
            even: self.even,
            signature: (self.signature.1, self.signature.0),
            det: if n % 2 == 0 { self.det.clone() } else { -&self.det },
        }
    }

    /// The Gram matrix in the basis given by the rows of `p`.
    pub fn transformed(&self, p: &IntMatrix) -> Result<Lattice> {
        Lattice::new(p.mul(&self.gram).mul(&p.transpose()))
    }

    /// Rows form a basis of `L^∨` in the coordinates of `L`: the inverse Gram matrix.
    pub fn dual_basis(&self) -> RatMatrix {
        self.gram.to_rat().inverse().expect("nondegenerate lattice")
    }

    /// The positive generator of the ideal `b(v, L)`.
    pub fn divisibility(&self, v: &[Int]) -> Result<Int> {
        self.check_vector(v)?;
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
        Ok(gcd_slice(&self.gram.mul_vec(v)))
    }

    /// The pair `(v², div(v, L))` of a primitive vector.
    pub fn vector_type(&self, v: &[Int]) -> Result<VectorType> {
        let div = self.divisibility(v)?;
        if !gcd_slice(v).is_one() {
            return Err(Error::NotPrimitive);
        }
        Ok(VectorType { square: self.square(v), divisibility: div })
    }

    pub fn full(&self) -> Sublattice {
        Sublattice { ambient: self.clone(), basis: IntMatrix::identity(self.rank()) }
    }

    pub fn sublattice(&self, basis: IntMatrix) -> Result<Sublattice> {
        Sublattice::new(self.clone(), basis)
    }

    pub fn sublattice_i64<R: AsRef<[i64]>>(&self, rows: &[R]) -> Result<Sublattice> {
        if rows.is_empty() {
            return Sublattice::new(self.clone(), IntMatrix::zeros(0, self.rank()));
        }
        Sublattice::new(self.clone(), IntMatrix::from_i64(rows))
    }
}

/// `(v², div(v, L))`; the divisibility always divides the square in an even lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorType {
    pub square: Int,
    pub divisibility: Int,
}

impl VectorType {
    pub fn new(square: i64, divisibility: i64) -> Self {
        VectorType { square: Int::from(square), divisibility: Int::from(divisibility) }
    }
}

impl fmt::Display for VectorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.square, self.divisibility)
    }
}

/// A sublattice of an ambient lattice; rows of `basis` are ambient coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct Sublattice {
    ambient: Lattice,
    basis: IntMatrix,
}

impl fmt::Debug for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sublattice(basis={:?})", self.basis)
    }
}

impl Sublattice {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Result<Sublattice> {
        if basis.ncols() != ambient.rank() {
            return Err(Error::SizeMismatch { expected: ambient.rank(), got: basis.ncols() });
        }
        if basis.rank() != basis.nrows() {
            return Err(Error::Invalid("sublattice basis rows are linearly dependent".into()));
        }
        Ok(Sublattice { ambient, basis })
    }

    /// Sublattice spanned by arbitrary generators (rows), which may be dependent.
    pub fn spanned_by(ambient: Lattice, generators: &IntMatrix) -> Result<Sublattice> {
        if generators.ncols() != ambient.rank() {
            return Err(Error::SizeMismatch { expected: ambient.rank(), got: generators.ncols() });
        }
        let basis = hermite_rows(generators);
        Ok(Sublattice { ambient, basis })
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    /// Induced Gram matrix `B G Bᵀ`.
    pub fn gram(&self) -> IntMatrix {
        self.basis.mul(self.ambient.gram()).mul(&self.basis.transpose())
    }

    pub fn as_lattice(&self) -> Result<Lattice> {
        if self.rank() == 0 {
            return Ok(Lattice::zero());
        }
        Lattice::new(self.gram())
    }

    /// Ambient coordinates of the vector with coordinates `c` in this basis.
    pub fn to_ambient(&self, c: &[Int]) -> Vec<Int> {
        self.basis.vec_mul(c)
    }

    /// Same sublattice with its basis in Hermite normal form.
    pub fn canonical(&self) -> Sublattice {
        Sublattice { ambient: self.ambient.clone(), basis: hermite_rows(&self.basis) }
    }

    /// Equality of the underlying subgroups (ignores the chosen basis).
    pub fn same_subgroup(&self, other: &Sublattice) -> bool {
        hermite_rows(&self.basis) == hermite_rows(&other.basis)
    }

    /// `{x ∈ L : b(x, s) = 0 for all s ∈ S}`, always primitive.
    pub fn orthogonal_complement(&self) -> Sublattice {
        let n = self.ambient.rank();
        if self.rank() == 0 {
            return self.ambient.full();
        }
        let m = self.basis.mul(self.ambient.gram());
        let k = integer_kernel(&m);
        let basis = if k.nrows() == 0 { IntMatrix::zeros(0, n) } else { hermite_rows(&k) };
        Sublattice { ambient: self.ambient.clone(), basis }
    }

    /// The saturation `(S ⊗ Q) ∩ L`.
    pub fn primitive_closure(&self) -> Sublattice {
        if self.rank() == 0 {
            return self.clone();
        }
        Sublattice { ambient: self.ambient.clone(), basis: saturate_rows(&self.basis) }
    }

    /// Index of `S` in its primitive closure.
    pub fn index_in_closure(&self) -> Int {
        if self.rank() == 0 {
            return Int::one();
        }
        let closure = self.primitive_closure();
        // coordinates of our basis in the closure basis
        let coords = solve_rows(&closure.basis, &self.basis).expect("S lies in its closure");
        coords.det().abs()
    }

    pub fn is_primitive(&self) -> bool {
        self.index_in_closure().is_one()
    }

    /// Coordinates of an ambient vector in this basis, if it lies in the sublattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        let target = IntMatrix::from_rows_with_cols(vec![v.to_vec()], v.len());
        let c = solve_rows(&self.basis, &target)?;
        Some(c.row(0).to_vec())
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        self.coordinates(v).is_some()
    }

    /// `M ∩ γ L^∨` as a sublattice of `L` (it is contained in `M ⊆ L`).
    pub fn intersect_scaled_dual(&self, gamma: &Int) -> Result<Sublattice> {
        if !gamma.is_positive() {
            return Err(Error::Invalid("scaling factor must be positive".into()));
        }
        let n = self.ambient.rank();
        let k = self.rank();
        if k == 0 {
            return Ok(self.clone());
        }
        // c ∈ Z^k with G Bᵀ c ≡ 0 mod γ: kernel of [G Bᵀ | -γ I] projected to c
        let a = self.ambient.gram().mul(&self.basis.transpose());
        let mut sys = IntMatrix::zeros(n, k + n);
        for i in 0..n {
            for j in 0..k {
                sys[(i, j)] = a[(i, j)].clone();
            }
            sys[(i, k + i)] = -gamma.clone();
        }
        let ker = integer_kernel(&sys);
        let proj = ker.select_cols(&(0..k).collect::<Vec<_>>());
        let coeffs = hermite_rows(&proj);
        debug_assert_eq!(coeffs.nrows(), k);
        Ok(Sublattice { ambient: self.ambient.clone(), basis: coeffs.mul(&self.basis) })
    }

    /// Restricts an ambient isometry that preserves this sublattice to a
    /// matrix acting on coordinates in this basis (column convention).
    pub fn restrict(&self, g: &IntMatrix) -> Option<IntMatrix> {
        // g acts on columns: images of basis vectors are g * b_i
        let images = g.mul(&self.basis.transpose()).transpose();
        let coords = solve_rows(&self.basis, &images)?;
        Some(coords.transpose())
    }
}

/// Solves `X * basis = target` over the integers (rows of `target` expressed
/// in the row basis). Returns `None` if some row is not in the integer span.
pub fn solve_rows(basis: &IntMatrix, target: &IntMatrix) -> Option<IntMatrix> {
    let k = basis.nrows();
    if k == 0 {
        return if target.is_zero() { Some(IntMatrix::zeros(target.nrows(), 0)) } else { None };
    }
    // pick k independent columns of the basis
    let bt = basis.to_rat();
    let mut cols: Vec<usize> = Vec::new();
    for j in 0..basis.ncols() {
        let mut trial = cols.clone();
        trial.push(j);
        let sub = select_cols_rat(&bt, &trial);
        if sub.rank() == trial.len() {
            cols = trial;
        }
        if cols.len() == k {
            break;
        }
    }
    if cols.len() < k {
        return None;
    }
    let square = select_cols_rat(&bt, &cols);
    let inv = square.inverse()?;
    let t = target.to_rat();
    let x = select_cols_rat(&t, &cols).mul(&inv);
    // verify the full system, then integrality
    if x.mul(&bt) != t {
        return None;
    }
    x.to_int()
}

fn select_cols_rat(m: &RatMatrix, idx: &[usize]) -> RatMatrix {
    RatMatrix::from_rows(
        (0..m.nrows())
            .map(|i| idx.iter().map(|&j| m[(i, j)].clone()).collect())
            .collect(),
    )
}

/// Index `[L : S ⊕ S^⊥]`, equivalently `|det|` of the stacked bases.
pub fn orthogonal_sum_index(s: &Sublattice, t: &Sublattice) -> Int {
    let stacked = s.basis().vstack(t.basis());
    if !stacked.is_square() {
        return Int::zero();
    }
    stacked.det().abs()
}
