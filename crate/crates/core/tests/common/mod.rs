//! Independent brute-force oracles and seeded random generators shared by
//! the integration tests and the acceptance runner.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hklattice::{Int, IntMatrix, Lattice};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn quad(g: &[Vec<i64>], x: &[i64]) -> i64 {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| x[i] * g[i][j] * x[j]).sum::<i64>()).sum()
}

pub fn to_i64(v: &[Int]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).unwrap()).collect()
}

pub fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_i64_rows().unwrap()
}

pub fn canonical(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Every nonzero `x` in `[-r, r]^n` with `|x^T G x| <= bound`.
pub fn box_vectors(g: &[Vec<i64>], bound: i64, r: i64) -> Vec<Vec<i64>> {
    let n = g.len();
    let mut out = Vec::new();
    let mut x = vec![-r; n];
    loop {
        if x.iter().any(|&c| c != 0) && quad(g, &x).abs() <= bound {
            out.push(x.clone());
        }
        let mut i = 0;
        while i < n && x[i] == r {
            x[i] = -r;
            i += 1;
        }
        if i == n {
            return out;
        }
        x[i] += 1;
    }
}

/// Roots of E8 in doubled coordinates `y = 2x`, `x` in the even coordinate
/// system `D8 ∪ (D8 + ½)`, by search over `{-2,…,2}^8`.
pub fn e8_roots_doubled() -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    for y in box_vectors(&identity(8), 8, 2) {
        if y.iter().map(|c| c * c).sum::<i64>() != 8 {
            continue;
        }
        let all_even = y.iter().all(|c| c % 2 == 0);
        let all_odd = y.iter().all(|c| c % 2 != 0);
        let s: i64 = y.iter().sum();
        if (all_even && (s / 2) % 2 == 0) || (all_odd && s % 4 == 0) {
            out.insert(y);
        }
    }
    out
}

/// Simple roots of E8 (Bourbaki order) in doubled coordinates.
pub fn e8_basis_doubled() -> Vec<Vec<i64>> {
    let mut b = vec![vec![1, -1, -1, -1, -1, -1, -1, 1], vec![2, 2, 0, 0, 0, 0, 0, 0]];
    for i in 0..6 {
        let mut r = vec![0; 8];
        r[i] = -2;
        r[i + 1] = 2;
        b.push(r);
    }
    b
}

pub fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Some primitive `x` modulo `2^k` with `x^T G x ≡ 0 (mod 2^k)`.
///
/// None means the form is anisotropic over `Q_2`. A solution with
/// `k ≥ 2·v_2(det) + 3` means it is isotropic (Hensel).
pub fn primitive_zero_mod_2k(g: &[Vec<i64>], k: u32) -> Option<Vec<i64>> {
    let m = 1i64 << k;
    let n = g.len();
    let mut x = vec![0i64; n];
    loop {
        if x.iter().any(|c| c % 2 != 0) && quad(g, &x).rem_euclid(m) == 0 {
            return Some(x);
        }
        let mut i = 0;
        while i < n && x[i] == m - 1 {
            x[i] = 0;
            i += 1;
        }
        if i == n {
            return None;
        }
        x[i] += 1;
    }
}

/// Values `x^T G x mod m` of a binary form.
pub fn binary_values_mod(g: [[i64; 2]; 2], m: i64) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for x in 0..m {
        for y in 0..m {
            out.insert((g[0][0] * x * x + 2 * g[0][1] * x * y + g[1][1] * y * y).rem_euclid(m));
        }
    }
    out
}

/// A random unimodular matrix built from elementary row operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> Vec<Vec<i64>> {
    let mut p = identity(n);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 if i != j => {
                let k = rng.gen_range(-2..=2);
                for c in 0..n {
                    p[i][c] += k * p[j][c];
                }
            }
            1 => p.swap(i, j),
            _ => p[i].iter_mut().for_each(|x| *x = -*x),
        }
    }
    p
}

pub fn matrix(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_i64(rows)
}

pub fn lattice(rows: &[Vec<i64>]) -> Lattice {
    Lattice::from_i64(rows).unwrap()
}

/// A random even symmetric matrix with entries in `[-r, r]`.
pub fn random_even_gram(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0; n]; n];
    for i in 0..n {
        g[i][i] = 2 * rng.gen_range(-r..=r);
        for j in i + 1..n {
            let x = rng.gen_range(-r..=r);
            g[i][j] = x;
            g[j][i] = x;
        }
    }
    g
}
