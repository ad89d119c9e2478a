//! Acceptance runner: one PASS/FAIL line per criterion, each under a pinned
//! wall-clock limit. All checks are exact.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use hklattice::discform::{count_elements_of_order, is_stable, DiscriminantForm};
use hklattice::embed::{even_overlattices, primitive_embeddings, EmbedOptions};
use hklattice::genus::{same_genus, GenusSymbol};
use hklattice::hk::{is_pex_free, k3n_lattice, WallSpec};
use hklattice::isom::{
    is_stably_saturated, is_stably_saturated_relative, real_spinor_norm, reflection, MatrixGroup,
};
use hklattice::matrix::ivec;
use hklattice::padic::{hilbert_symbol, is_isotropic, prime_factors, Place};
use hklattice::shortvec::{short_vectors, short_vectors_all};
use hklattice::standard::{a, d, e8, mukai, rank_one, standard_lattice};
use hklattice::vinberg::{
    check_relation, fundamental_chamber, reflection_word_scan, wall_orthogonals, Position, VinbergOptions,
};
use hklattice::{Int, IntMatrix, Lattice, Rat, VectorType};
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::Value;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = hklattice::cli::run(std::iter::once("hklattice").chain(args.iter().copied()), &mut out, &mut err);
    ensure!(code == 0, "{args:?} exited with {code}: {}", String::from_utf8_lossy(&err));
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn vset(vs: &[Vec<Int>]) -> BTreeSet<Vec<i64>> {
    vs.iter().map(|v| to_i64(v)).collect()
}

fn set(vs: &[&[i64]]) -> BTreeSet<Vec<i64>> {
    vs.iter().map(|v| v.to_vec()).collect()
}

/// A unimodular `P` with `P A Pᵀ = B`, by search over entries in `[-r, r]`.
fn basis_change(a: &[Vec<i64>], b: &[Vec<i64>], r: i64) -> Option<[[i64; 2]; 2]> {
    for p00 in -r..=r {
        for p01 in -r..=r {
            for p10 in -r..=r {
                for p11 in -r..=r {
                    if (p00 * p11 - p01 * p10).abs() != 1 {
                        continue;
                    }
                    let p = [[p00, p01], [p10, p11]];
                    let ok = (0..2).all(|i| {
                        (0..2).all(|j| {
                            let s: i64 = (0..2).map(|k| (0..2).map(|l| p[i][k] * a[k][l] * p[j][l]).sum::<i64>()).sum();
                            s == b[i][j]
                        })
                    });
                    if ok {
                        return Some(p);
                    }
                }
            }
        }
    }
    None
}

fn overlattice_fixture() -> Check {
    let v = cli(&["overlat", &fixture("diag_4_m12.json")])?;
    ensure!(v["proper"] == "1", "diag(4,-12): expected one proper overlattice, got {}", v["proper"]);
    let none = cli(&["overlat", &fixture("ns.json")])?;
    ensure!(none["proper"] == "0", "NS: expected none, got {}", none["proper"]);
    let l = lattice(&[vec![4, 0], vec![0, -12]]);
    let proper: Vec<_> = even_overlattices(&l, 1 << 16).map_err(err)?.into_iter().filter(|o| !o.index.is_one()).collect();
    ensure!(proper.len() == 1, "library disagrees with the report");
    let ns = lattice(&[vec![4, 2], vec![2, -2]]);
    let over = &proper[0].lattice;
    ensure!(same_genus(over, &ns).map_err(err)?, "overlattice not in the genus of NS");
    let p = basis_change(&rows(over.gram()), &rows(ns.gram()), 4).ok_or("no explicit basis change found")?;
    let pm = IntMatrix::from_i64(&p);
    ensure!(over.transformed(&pm).map_err(err)?.gram() == ns.gram(), "basis change does not map the Gram matrix");
    Ok(())
}

fn ns_chamber() -> Result<hklattice::vinberg::ChamberData, String> {
    fundamental_chamber(&lattice(&[vec![4, 2], vec![2, -2]]), &[1, 0], &[-2], &VinbergOptions::default()).map_err(err)
}

fn vinberg_fixture() -> Check {
    let c = ns_chamber()?;
    ensure!(vset(&c.walls) == set(&[&[1, -1], &[0, 1]]), "walls {:?}", c.walls);
    ensure!(c.complete, "chamber not closed");
    let orth = wall_orthogonals(&c).map_err(err)?;
    ensure!(vset(&orth) == set(&[&[2, -1], &[1, 1]]), "wall orthogonals {orth:?}");
    for w in &orth {
        ensure!(c.lattice.square(w) == Int::from(6), "square of {w:?} is not 6");
    }
    let v = cli(&["vinberg", &fixture("ns.json"), "--controller", "1,0", "--squares", "-2"])?;
    let roots: BTreeSet<&str> = v["walls"].as_array().unwrap().iter().map(|w| w["root"].as_str().unwrap()).collect();
    ensure!(roots == BTreeSet::from(["(1,-1)", "(0,1)"]), "CLI walls {roots:?}");
    Ok(())
}

fn reflection_relation() -> Check {
    let c = ns_chamber()?;
    let l = &c.lattice;
    let (h, dd) = (ivec(&[1, 0]), ivec(&[-1, 2]));
    let plus = ivec(&[0, 1]);
    let minus = ivec(&[1, -1]);
    let two = Int::from(2);
    ensure!(
        (0..2).all(|i| &h[i] + &dd[i] == &two * &plus[i] && &h[i] - &dd[i] == &two * &minus[i]),
        "(H±D)/2 miscomputed"
    );
    let t = |v: &[Int]| reflection(v, l).map_err(err);
    let (tp, td, tm) = (t(&plus)?, t(&dd)?, t(&minus)?);
    ensure!(check_relation(&[tp, td.clone()], &[td.clone(), tm]), "relation fails");
    ensure!(td.mul_vec(&h) == h, "τ_D moves H");
    let scan = reflection_word_scan(&c, &[dd], 6).map_err(err)?;
    ensure!(scan.words.len() == 12, "expected 12 reduced words, got {}", scan.words.len());
    ensure!(scan.all_outside, "some word keeps H in the chamber");
    ensure!(scan.words.iter().all(|w| w.position == Position::Outside), "inconsistent scan");
    ensure!(scan.extras[0].fixes_controller && scan.extras[0].preserves_chamber, "τ_D does not preserve the chamber");
    Ok(())
}

fn q2_anisotropy() -> Check {
    let g = vec![vec![4, 2, -2], vec![2, -2, -1], vec![-2, -1, 2]];
    let v = cli(&["isotropy", &fixture("n.json"), "--p", "2"])?;
    ensure!(v["verdict"] == "anisotropic", "CLI verdict {}", v["verdict"]);
    ensure!(!is_isotropic(&lattice(&g), Place::Prime(2)), "library says isotropic");
    ensure!(primitive_zero_mod_2k(&g, 6).is_none(), "oracle found a primitive zero mod 2^6");
    Ok(())
}

fn wall_screening() -> Check {
    let l = k3n_lattice(3).map_err(err)?;
    let n = l.rank();
    let spec = WallSpec::k3n3();
    let mut w = vec![0i64; n];
    w[n - 1] = 1;
    let summand = l.sublattice_i64(&[w.clone()]).map_err(err)?;
    let r = is_pex_free(&summand, &spec).map_err(err)?;
    let (wit, t) = r.witness.ok_or("[-4] summand screened as pex-free")?;
    ensure!(t == VectorType::new(-4, 4) && spec.pex_types.contains(&t), "summand type {t}");
    ensure!(to_i64(&wit) == w, "witness {wit:?}");
    let mut hv = vec![0i64; n];
    hv[0] = 2;
    hv[1] = 2;
    hv[n - 1] = 1;
    let ht = l.vector_type(&ivec(&hv)).map_err(err)?;
    ensure!(ht == VectorType::new(4, 2), "H has type {ht}");
    let mut root = vec![0i64; n];
    root[0] = 1;
    root[1] = -1;
    let rs = l.sublattice_i64(&[root]).map_err(err)?;
    let rr = is_pex_free(&rs, &spec).map_err(err)?;
    ensure!(rr.witness.map(|x| x.1) == Some(VectorType::new(-2, 1)), "root not detected");
    Ok(())
}

fn discriminant_fixtures() -> Check {
    let k = DiscriminantForm::new(&k3n_lattice(3).map_err(err)?).map_err(err)?;
    ensure!(k.invariant_factors() == [Int::from(4)], "K3[3]: {:?}", k.invariant_factors());
    ensure!(count_elements_of_order(&k, 2, 1 << 16).map_err(err)? == 1, "K3[3]: elements of order 2");
    let lam = DiscriminantForm::new(&standard_lattice("U^2 + E8^2 + [-2]^2").map_err(err)?).map_err(err)?;
    ensure!(lam.invariant_factors() == [Int::from(2), Int::from(2)], "Λ: {:?}", lam.invariant_factors());
    let o = lam.orthogonal_group(1 << 16).map_err(err)?;
    ensure!(o.len() == 2, "|O(D_Λ)| = {}", o.len());
    let e = DiscriminantForm::new(&e8()).map_err(err)?;
    ensure!(e.is_trivial() && e.order().is_one(), "E8 not unimodular");
    let v = cli(&["disc", &fixture("k3n3.json")])?;
    ensure!(v["order"] == "4", "CLI order {}", v["order"]);
    Ok(())
}

fn short_vector_counts() -> Check {
    let l = e8();
    let all = short_vectors_all(&l, &Int::from(2)).map_err(err)?;
    let pairs = short_vectors(&l, &Int::from(2)).map_err(err)?;
    ensure!(all.len() == 240 && pairs.len() == 120, "E8: {} vectors, {} pairs", all.len(), pairs.len());
    let oracle = e8_roots_doubled();
    ensure!(oracle.len() == 240, "oracle found {}", oracle.len());
    let basis = e8_basis_doubled();
    let gram: Vec<Vec<i64>> = basis
        .iter()
        .map(|u| basis.iter().map(|v| u.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() / 4).collect())
        .collect();
    let model: BTreeSet<Vec<i64>> = short_vectors_all(&lattice(&gram), &Int::from(2))
        .map_err(err)?
        .iter()
        .map(|c| {
            let c = to_i64(c);
            (0..8).map(|k| (0..8).map(|i| c[i] * basis[i][k]).sum()).collect()
        })
        .collect();
    ensure!(model == oracle, "E8 roots differ from the coordinate oracle");
    let a2 = a(2).map_err(err)?;
    let found = vset(&short_vectors_all(&a2, &Int::from(2)).map_err(err)?);
    let boxed: BTreeSet<Vec<i64>> = box_vectors(&rows(a2.gram()), 2, 3).into_iter().collect();
    ensure!(found.len() == 6 && found == boxed, "A2: {found:?} vs {boxed:?}");
    Ok(())
}

const TABLE_GENERA: [&str; 12] = [
    "II_(1,21)4^-1_5 3^-1 7^-1",
    "II_(1,21)2^1_7 4^-1_3 16^-1_3",
    "II_(1,21)2^2 8^-1_3 3^1",
    "II_(1,21)4^-1_5 8^-2_4",
    "II_(1,21)4^1_1 3^1 5^1 7^1",
    "II_(1,21)2^-3_4 4^-1_5 9^-1",
    "II_(1,21)2^-1_3 4^2_0 3^-1 5^1",
    "II_(1,21)2^3_7 3^-1 5^1",
    "II_(1,21)2^-2_2 4^1_1 3^1 5^-1",
    "II_(1,21)4^1_1 11^2",
    "II_(1,21)2^-2_2 4^1_7 5^2",
    "II_(0,20)4^2_2 7^1",
];

fn genus_engine() -> Check {
    let e = GenusSymbol::of(&e8()).map_err(err)?;
    ensure!(e.to_string() == "II_(0,8)", "E8 symbol {e}");
    let fixtures: Vec<Lattice> = vec![
        lattice(&[vec![4, 2], vec![2, -2]]),
        lattice(&[vec![4, 0], vec![0, -12]]),
        lattice(&[vec![4, 2, -2], vec![2, -2, -1], vec![-2, -1, 2]]),
        standard_lattice("U + [-4]").map_err(err)?,
        a(2).map_err(err)?,
        d(4).map_err(err)?,
        e8(),
        k3n_lattice(3).map_err(err)?,
    ];
    let mut r = rng(8);
    for l in &fixtures {
        let s = GenusSymbol::of(l).map_err(err)?;
        for _ in 0..100 {
            let p = random_unimodular(&mut r, l.rank(), 3 * l.rank());
            let m = l.transformed(&matrix(&p)).map_err(err)?;
            ensure!(GenusSymbol::of(&m).map_err(err)? == s, "symbol changed under a basis change of {s}");
        }
    }
    for text in TABLE_GENERA {
        let g = GenusSymbol::parse(text).map_err(err)?;
        ensure!(g.to_string() == text, "{text} printed as {g}");
        ensure!(GenusSymbol::parse(&g.to_string()).map_err(err)? == g, "{text} does not re-parse");
        if let Err(why) = g.check_consistency() {
            eprintln!("  note: table genus {text} is not realizable: {why}");
        }
    }
    Ok(())
}

fn embedding_engine() -> Check {
    let opts = EmbedOptions::default();
    let m2 = rank_one(-2).map_err(err)?;
    let u = standard_lattice("U").map_err(err)?;
    let in_u = primitive_embeddings(&m2, &u, &opts).map_err(err)?;
    ensure!(in_u.len() == 1, "[-2] ⊂ U: {} orbits", in_u.len());
    let in_e8 = primitive_embeddings(&m2, &e8(), &opts).map_err(err)?;
    ensure!(in_e8.len() == 1, "[-2] ⊂ E8: {} orbits", in_e8.len());
    let ns = lattice(&[vec![4, 2], vec![2, -2]]);
    let a2 = a(2).map_err(err)?;
    let k3 = k3n_lattice(3).map_err(err)?;
    let cases = [(&m2, &u), (&m2, &e8()), (&a2, &e8()), (&ns, &k3), (&a2, &k3), (&rank_one(-4).map_err(err)?, &mukai())];
    let mut total = 0;
    for (m, l) in cases {
        for emb in primitive_embeddings(m, l, &opts).map_err(err)? {
            let k = emb.complement.as_lattice().map_err(err)?;
            ensure!(emb.image.is_primitive(), "image not primitive");
            ensure!(
                m.det() * k.det() == l.det() * &emb.glue_order * &emb.glue_order,
                "det identity fails for an embedding of det {} into det {}",
                m.det(),
                l.det()
            );
            total += 1;
        }
    }
    ensure!(total >= 7, "only {total} embeddings produced");
    Ok(())
}

fn saturation() -> Check {
    let l = lattice(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]);
    let g = MatrixGroup::new(l.clone(), vec![IntMatrix::from_i64(&[[1, 0, 0], [0, 1, 0], [0, 0, -1]])]).map_err(err)?;
    let c = g.coinvariant_sublattice();
    ensure!(c.rank() == 1 && c.gram() == IntMatrix::from_i64(&[[-2]]), "coinvariant is not [-2]");
    let rep = is_stably_saturated(&g, &Default::default()).map_err(err)?;
    ensure!(rep.saturated, "-id on [-2] not saturated: {rep:?}");
    let trivial = MatrixGroup::trivial(l);
    let rel = is_stably_saturated_relative(&trivial, &c, &Default::default()).map_err(err)?;
    ensure!(!rel.saturated, "trivial group reported saturated on [-2]");
    let v = cli(&["saturate", &fixture("sat_minus_id.json")])?;
    ensure!(v["stably_saturated"] == true, "CLI verdict {}", v["stably_saturated"]);
    Ok(())
}

fn places_of(xs: &[i64]) -> Vec<Place> {
    let prod = xs.iter().fold(Int::from(2), |acc, &x| acc * Int::from(x));
    let mut ps: Vec<Place> = prime_factors(&prod).unwrap().into_iter().map(Place::Prime).collect();
    ps.push(Place::Infinity);
    ps
}

fn property_suites() -> Check {
    let mut r = rng(11);
    for _ in 0..50 {
        let mut x = || {
            let v: i64 = r.gen_range(1..5000);
            if r.gen_bool(0.5) { -v } else { v }
        };
        let (an, ad, bn, bd) = (x(), x().abs(), x(), x().abs());
        let a = Rat::new(Int::from(an), Int::from(ad));
        let b = Rat::new(Int::from(bn), Int::from(bd));
        let prod: i64 = places_of(&[an, ad, bn, bd]).into_iter().map(|p| i64::from(hilbert_symbol(&a, &b, p))).product();
        ensure!(prod == 1, "Hilbert product formula fails for ({a}, {b})");
    }
    let l = lattice(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]);
    let pool: Vec<IntMatrix> = [[1, -1, 0], [1, 1, 0], [0, 0, 1], [1, 2, 1], [2, 1, 1], [1, 0, 1]]
        .iter()
        .map(|v| reflection(&ivec(v), &l).unwrap())
        .collect();
    let word = |r: &mut rand_chacha::ChaCha8Rng| {
        let len = r.gen_range(1..7);
        (0..len).fold(IntMatrix::identity(3), |m, _| m.mul(&pool[r.gen_range(0..pool.len())]))
    };
    for _ in 0..50 {
        let (g, h) = (word(&mut r), word(&mut r));
        let s = |m: &IntMatrix| real_spinor_norm(m, &l).unwrap();
        ensure!(s(&g.mul(&h)) == s(&g) * s(&h), "spinor norm not multiplicative");
    }
    let fixtures = [a(2).unwrap(), a(3).unwrap(), d(4).unwrap(), e8(), standard_lattice("A2 + A1").unwrap()];
    for i in 0..20 {
        let l = &fixtures[i % fixtures.len()];
        let roots = short_vectors(l, &Int::from(2)).map_err(err)?;
        let k = r.gen_range(0..4);
        let gens: Vec<IntMatrix> =
            (0..k).map(|_| reflection(&roots[r.gen_range(0..roots.len())], l).unwrap()).collect();
        let g = MatrixGroup::new(l.clone(), gens).map_err(err)?;
        let (inv, co) = (g.invariant_sublattice(), g.coinvariant_sublattice());
        ensure!(inv.rank() + co.rank() == l.rank(), "ranks do not add up");
        for x in 0..inv.rank() {
            for y in 0..co.rank() {
                ensure!(l.product(inv.basis().row(x), co.basis().row(y)).is_zero(), "L^G not orthogonal to L_G");
            }
        }
    }
    let lats = [k3n_lattice(3).unwrap(), mukai(), lattice(&[vec![4, 2], vec![2, -2]])];
    let mut done = 0;
    while done < 200 {
        let l = &lats[done % lats.len()];
        let v: Vec<Int> = (0..l.rank()).map(|_| Int::from(r.gen_range(-9..=9))).collect();
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let div = l.divisibility(&v).map_err(err)?;
        ensure!((l.square(&v) % &div).is_zero(), "div({v:?}) does not divide the square");
        done += 1;
    }
    Ok(())
}

fn pipeline_smoke() -> Check {
    let v = cli(&["pipeline", &fixture("a2_pair.json")])?;
    let orbits = v["orbits"].as_array().ok_or("no orbits")?;
    ensure!(!orbits.is_empty(), "no embeddings");
    for o in orbits {
        for key in ["pex", "wall"] {
            let rep = &o[key];
            ensure!(rep["free"].is_boolean(), "{key} flag missing");
            ensure!(rep["free"] == true || rep["witness"].is_object(), "{key} hit without witness");
            ensure!(rep["reference"].is_string(), "{key} report without reference lattice");
        }
        ensure!(o["stable_certificate"] == true, "extended group fails the stability certificate");
    }
    let input = hklattice::hk::LeechPairInput::new(
        a(2).unwrap(),
        vec![IntMatrix::from_i64(&[[-1, 1], [0, 1]]), IntMatrix::from_i64(&[[1, 0], [1, -1]])],
        "A2",
    )
    .map_err(err)?;
    let k3 = k3n_lattice(3).unwrap();
    let res = hklattice::hk::classify_leech_pair(&input, &k3, &WallSpec::k3n3(), &EmbedOptions::default()).map_err(err)?;
    for c in &res {
        for g in &c.extended_generators {
            ensure!(is_stable(g, &c.embedding.ambient).map_err(err)?, "extended generator not stable");
        }
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let s = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "overlattice fixture", limit: s(1), run: overlattice_fixture },
        Criterion { id: 2, name: "Vinberg walls of NS", limit: s(1), run: vinberg_fixture },
        Criterion { id: 3, name: "reflection relation and word scan", limit: s(1), run: reflection_relation },
        Criterion { id: 4, name: "Q2 anisotropy", limit: s(5), run: q2_anisotropy },
        Criterion { id: 5, name: "wall screening", limit: s(1), run: wall_screening },
        Criterion { id: 6, name: "discriminant fixtures", limit: s(1), run: discriminant_fixtures },
        Criterion { id: 7, name: "short vectors", limit: s(10), run: short_vector_counts },
        Criterion { id: 8, name: "genus engine", limit: s(30), run: genus_engine },
        Criterion { id: 9, name: "embedding engine", limit: s(60), run: embedding_engine },
        Criterion { id: 10, name: "stable saturation", limit: s(1), run: saturation },
        Criterion { id: 11, name: "property suites", limit: s(60), run: property_suites },
        Criterion { id: 12, name: "pipeline smoke test", limit: s(60), run: pipeline_smoke },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let verdict = match &result {
            Ok(()) if took <= c.limit => "PASS",
            _ => "FAIL",
        };
        let detail = match result {
            Err(e) => format!(": {e}"),
            Ok(()) if took > c.limit => ": over the time limit".to_string(),
            Ok(()) => String::new(),
        };
        println!("{verdict} {:>2} {:<34} {:>8.3}s (limit {}s){detail}", c.id, c.name, took.as_secs_f64(), c.limit.as_secs());
        if verdict == "FAIL" {
            failed += 1;
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
