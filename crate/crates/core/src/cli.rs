//! Command-line front end. Every subcommand prints one JSON report; all
//! integers and rationals in reports are strings.
//!
//! Exit codes: 0 on success, 1 when a library operation rejects the input,
//! 2 for unreadable or malformed files and arguments.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::autom::AutomOptions;
use crate::discform::DiscriminantForm;
use crate::embed::{even_overlattices, primitive_embeddings, EmbedOptions, EmbeddingResult, Guarantee};
use crate::error::Error;
use crate::files::{
    detect_kind, parse_group_file, parse_lattice_file, parse_leech_pair_file, FileKind, FormatError, LatticeFile,
    LatticeRef, LatticeSpec,
};
use crate::genus::GenusSymbol;
use crate::hk::{
    classify_leech_pair, is_pex_free, is_wall_free, k3n_lattice, polarized_report, symplectic_check, LeechPairInput,
    ScreeningReport, WallSpec,
};
use crate::isom::{is_stably_saturated, DEFAULT_ELEMENT_CAP, membership, real_spinor_norm, reflection, MatrixGroup};
use crate::lattice::{Lattice, Sublattice, VectorType};
use crate::matrix::{smith_normal_form, Int, IntMatrix, Rat};
use crate::padic::{is_isotropic, prime_factors, relevant_places, Place};
use crate::shortvec::{primitive_vectors_of_type, short_vectors};
use crate::standard::standard_lattice;
use crate::vinberg::{
    check_relation, fundamental_chamber, reflection_word_scan, wall_orthogonals, Position, VinbergOptions,
};

#[derive(Debug, Parser)]
#[command(name = "hklattice", version, about = "Exact computations on even integral lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank, parity, signature, determinant and discriminant group.
    Info { file: PathBuf },
    /// Generators of the discriminant group with their quadratic values.
    Disc { file: PathBuf },
    /// Genus symbol.
    Genus {
        file: PathBuf,
        /// Print only the symbol string.
        #[arg(long)]
        string: bool,
    },
    /// Nonzero vectors with |v²| at most the bound, one per ± pair.
    Shorts {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        bound: Int,
    },
    /// Primitive vectors of a sublattice with given square and divisibility in FILE.
    Typevecs {
        file: PathBuf,
        #[arg(long)]
        sub: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        square: Int,
        #[arg(long)]
        div: Int,
    },
    /// Invariant and coinvariant sublattices of a group.
    Coinv { file: PathBuf },
    /// Spinor norm and stability of each generator.
    Stable { file: PathBuf },
    /// Stable saturation test.
    Saturate { file: PathBuf },
    /// Wall divisor screening of a group's coinvariant lattice or of a sublattice.
    Wallcheck {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: i64,
        #[arg(long)]
        pex_only: bool,
    },
    /// Primitive embeddings of MFILE into LFILE.
    Embed { mfile: PathBuf, lfile: PathBuf },
    /// Proper even overlattices.
    Overlat { file: PathBuf },
    /// Walls of the Vinberg chamber containing the controller.
    Vinberg {
        file: PathBuf,
        /// Controller vector, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        controller: String,
        /// Root squares, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        squares: String,
        /// Scan reduced words in the wall reflections up to this length.
        #[arg(long)]
        scan_words: Option<usize>,
        /// Extra reflection vector to test against the chamber (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        extra: Vec<String>,
        /// Perturb a controller lying on a root hyperplane.
        #[arg(long)]
        perturb: bool,
        #[arg(long, allow_hyphen_values = true)]
        max_distance: Option<Rat>,
    },
    /// Local isotropy at one place, or the necessary condition for containing U(k).
    Isotropy {
        file: PathBuf,
        /// A prime or `inf`.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        p: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Classification of the embeddings of a Leech pair.
    Pipeline {
        file: PathBuf,
        /// Polarization type `square,divisibility`.
        #[arg(long, allow_hyphen_values = true)]
        polarize: Option<String>,
        /// Coordinate box for indefinite invariant lattices.
        #[arg(long, default_value_t = 4)]
        box_bound: u64,
    },
}

/// A failure with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(#[from] Error),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.0)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Domain(Error::Parse { .. } | Error::UnknownName(_)) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn report(&self) -> String {
        match self {
            CliError::Input(m) => format!("error: input: {m}"),
            CliError::Domain(e) => {
                let dbg = format!("{e:?}");
                let variant = dbg.split(['(', ' ', '{']).next().unwrap_or("");
                format!("error: Error::{variant}: {e}")
            }
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = write!(out, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.report());
            e.exit_code()
        }
    }
}

/// Runs a subcommand and returns its report text.
pub fn execute(cmd: &Command) -> CliResult<String> {
    match cmd {
        Command::Info { file } => emit(info(&load_lattice(file)?)?),
        Command::Disc { file } => emit(disc(&load_lattice(file)?)?),
        Command::Genus { file, string } => {
            let g = GenusSymbol::of(&load_lattice(file)?.lattice)?;
            if *string {
                Ok(format!("{g}\n"))
            } else {
                emit(genus_report(&g))
            }
        }
        Command::Shorts { file, bound } => emit(shorts(&load_lattice(file)?, bound)?),
        Command::Typevecs { file, sub, square, div } => emit(typevecs(file, sub, square, div)?),
        Command::Coinv { file } => emit(coinv(&load_group(file)?)?),
        Command::Stable { file } => emit(stable(&load_group(file)?)?),
        Command::Saturate { file } => emit(saturate(&load_group(file)?)?),
        Command::Wallcheck { file, n, pex_only } => emit(wallcheck(file, *n, *pex_only)?),
        Command::Embed { mfile, lfile } => emit(embed(&load_lattice(mfile)?, &load_lattice(lfile)?)?),
        Command::Overlat { file } => emit(overlat(&load_lattice(file)?)?),
        Command::Vinberg { file, controller, squares, scan_words, extra, perturb, max_distance } => {
            let mut opts = VinbergOptions { perturb: *perturb, ..VinbergOptions::default() };
            if let Some(d) = max_distance {
                opts.max_distance = d.clone();
            }
            emit(vinberg(&load_lattice(file)?, controller, squares, *scan_words, extra, &opts)?)
        }
        Command::Isotropy { file, p, all } => emit(isotropy(&load_lattice(file)?, p.as_deref(), *all)?),
        Command::Pipeline { file, polarize, box_bound } => emit(pipeline(file, polarize.as_deref(), *box_bound)?),
    }
}

fn emit(v: Value) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// A resolved lattice file.
pub struct Loaded {
    pub label: String,
    pub lattice: Lattice,
    /// Present when the file gives a basis in an ambient lattice.
    pub sub: Option<Sublattice>,
    pub ambient_label: Option<String>,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn spec_lattice(s: &LatticeSpec) -> CliResult<Lattice> {
    Ok(match s {
        LatticeSpec::Name(n) => standard_lattice(n)?,
        LatticeSpec::Gram(g) => Lattice::new(g.clone())?,
    })
}

fn spec_label(s: &LatticeSpec) -> String {
    match s {
        LatticeSpec::Name(n) => n.clone(),
        LatticeSpec::Gram(_) => "ambient".into(),
    }
}

/// Builds the lattice (and sublattice, if any) a lattice file describes.
pub fn resolve(f: &LatticeFile, default_label: &str) -> CliResult<Loaded> {
    let label = f.label.clone().unwrap_or_else(|| default_label.to_string());
    let Some(basis) = &f.basis else {
        let lattice = spec_lattice(f.gram.as_ref().expect("parser guarantees gram or basis"))?;
        return Ok(Loaded { label, lattice, sub: None, ambient_label: None });
    };
    let Some(amb) = &f.ambient else {
        return Err(CliError::Input("`basis` needs an `ambient` lattice here".into()));
    };
    let ambient = spec_lattice(amb)?;
    let sub = Sublattice::new(ambient, basis.clone())?;
    let lattice = sub.as_lattice()?;
    if let Some(g) = &f.gram {
        if spec_lattice(g)?.gram() != lattice.gram() {
            return Err(Error::Invalid("`gram` differs from the Gram matrix of `basis`".into()).into());
        }
    }
    Ok(Loaded { label, lattice, sub: Some(sub), ambient_label: Some(spec_label(amb)) })
}

pub fn load_lattice(path: &Path) -> CliResult<Loaded> {
    resolve(&parse_lattice_file(&read(path)?)?, &stem(path))
}

fn load_ref(r: &LatticeRef, base: &Path) -> CliResult<Loaded> {
    match r {
        LatticeRef::Inline(f) => resolve(f, "lattice"),
        LatticeRef::Path(p) => load_lattice(&base.parent().unwrap_or(Path::new(".")).join(p)),
    }
}

pub fn load_group(path: &Path) -> CliResult<(String, MatrixGroup)> {
    let f = parse_group_file(&read(path)?)?;
    let l = load_ref(&f.lattice, path)?;
    let label = f.label.unwrap_or_else(|| stem(path));
    Ok((label, MatrixGroup::new(l.lattice, f.generators)?))
}

fn vs<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn rows(m: &IntMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::String(vs(m.row(i)))).collect())
}

fn sig(l: &Lattice) -> String {
    let (p, q) = l.signature();
    format!("({p},{q})")
}

fn sublattice_report(s: &Sublattice) -> CliResult<Value> {
    Ok(json!({
        "rank": s.rank().to_string(),
        "basis": rows(s.basis()),
        "gram": rows(&s.gram()),
        "det": s.as_lattice()?.det().to_string(),
    }))
}

fn info(l: &Loaded) -> CliResult<Value> {
    let lat = &l.lattice;
    let factors: Vec<Value> = smith_normal_form(lat.gram())
        .diagonal()
        .into_iter()
        .map(|d| d.abs())
        .filter(|d| !d.is_one())
        .map(|d| Value::String(d.to_string()))
        .collect();
    Ok(json!({
        "label": l.label,
        "rank": lat.rank().to_string(),
        "even": lat.is_even(),
        "signature": sig(lat),
        "det": lat.det().to_string(),
        "discriminant_group": {
            "invariant_factors": factors,
            "order": lat.det().abs().to_string(),
        },
    }))
}

fn disc(l: &Loaded) -> CliResult<Value> {
    let d = DiscriminantForm::new(&l.lattice)?;
    let gens: Vec<Value> = d
        .generators()
        .iter()
        .zip(d.invariant_factors())
        .zip(d.generator_q_values())
        .map(|((g, ord), q)| json!({ "vector": vs(g), "order": ord.to_string(), "q": q.to_string() }))
        .collect();
    let bil: Vec<Value> = d.bilinear_matrix().iter().map(|r| Value::String(vs(r))).collect();
    Ok(json!({
        "label": l.label,
        "order": d.order().to_string(),
        "invariant_factors": d.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "generators": gens,
        "bilinear": bil,
    }))
}

fn genus_report(g: &GenusSymbol) -> Value {
    let locals: Vec<Value> = g
        .locals
        .iter()
        .map(|loc| {
            let cs: Vec<Value> = loc
                .constituents
                .iter()
                .map(|c| {
                    let mut v = json!({
                        "scale": format!("{}^{}", loc.prime, c.exponent),
                        "rank": c.rank.to_string(),
                        "sign": c.sign.to_string(),
                    });
                    if loc.prime == 2 {
                        v["type"] = Value::String(if c.odd { "I" } else { "II" }.into());
                        v["oddity"] = Value::String(c.oddity.to_string());
                    }
                    v
                })
                .collect();
            json!({ "prime": loc.prime.to_string(), "constituents": cs })
        })
        .collect();
    json!({
        "symbol": g.to_string(),
        "signature": format!("({},{})", g.signature.0, g.signature.1),
        "det": g.det().to_string(),
        "locals": locals,
    })
}

fn shorts(l: &Loaded, bound: &Int) -> CliResult<Value> {
    let vs_: Vec<Value> = short_vectors(&l.lattice, bound)?
        .iter()
        .map(|v| json!({ "vector": vs(v), "square": l.lattice.square(v).to_string() }))
        .collect();
    Ok(json!({
        "label": l.label,
        "bound": bound.abs().to_string(),
        "pairs": vs_.len().to_string(),
        "vectors": vs_,
    }))
}

fn typevecs(file: &Path, sub: &Path, square: &Int, div: &Int) -> CliResult<Value> {
    let amb = load_lattice(file)?;
    let sf = parse_lattice_file(&read(sub)?)?;
    let Some(basis) = &sf.basis else {
        return Err(CliError::Input(format!("{}: missing `basis`", sub.display())));
    };
    let m = Sublattice::new(amb.lattice.clone(), basis.clone())?;
    let found = primitive_vectors_of_type(&m, square, div)?;
    Ok(json!({
        "reference": amb.label,
        "sublattice": sf.label.clone().unwrap_or_else(|| stem(sub)),
        "type": VectorType { square: square.clone(), divisibility: div.clone() }.to_string(),
        "pairs": found.len().to_string(),
        "vectors": found.iter().map(|v| vs(v)).collect::<Vec<_>>(),
    }))
}

fn coinv((label, g): &(String, MatrixGroup)) -> CliResult<Value> {
    Ok(json!({
        "label": label,
        "invariant": sublattice_report(&g.invariant_sublattice())?,
        "coinvariant": sublattice_report(&g.coinvariant_sublattice())?,
    }))
}

fn stable((label, g): &(String, MatrixGroup)) -> CliResult<Value> {
    let l = g.lattice();
    let mut gens = Vec::new();
    for (i, m) in g.generators().iter().enumerate() {
        let mem = membership(m, l)?;
        gens.push(json!({
            "index": i.to_string(),
            "spinor": real_spinor_norm(m, l)?.to_string(),
            "stable": mem.in_o_sharp,
            "o_plus": mem.in_o_plus,
        }));
    }
    Ok(json!({ "label": label, "generators": gens }))
}

fn saturate((label, g): &(String, MatrixGroup)) -> CliResult<Value> {
    let r = is_stably_saturated(g, &AutomOptions::default())?;
    Ok(json!({
        "label": label,
        "stably_saturated": r.saturated,
        "coinvariant_rank": r.coinvariant_rank.to_string(),
        "image_order": r.image_order.to_string(),
        "stable_order": r.stable_order.to_string(),
    }))
}

fn screening(r: &ScreeningReport, reference: &str) -> Value {
    let counts: Vec<Value> = r
        .counts
        .iter()
        .map(|c| {
            json!({
                "type": c.vector_type.to_string(),
                "pairs": c.pairs.to_string(),
                "witness": c.witness.as_ref().map(|w| vs(w)),
            })
        })
        .collect();
    json!({
        "free": r.free,
        "reference": reference,
        "witness": r.witness.as_ref().map(|(v, t)| json!({ "vector": vs(v), "type": t.to_string() })),
        "counts": counts,
    })
}

fn wallcheck(file: &Path, n: i64, pex_only: bool) -> CliResult<Value> {
    let spec = WallSpec::for_n(n)?;
    let text = read(file)?;
    if detect_kind(&text)? == FileKind::Lattice {
        let l = load_lattice(file)?;
        let (sub, reference) = match l.sub {
            Some(s) => (s, l.ambient_label.unwrap_or_default()),
            None => (l.lattice.full(), l.label.clone()),
        };
        let amb = sub.ambient();
        let types = (0..sub.rank())
            .map(|i| Ok(json!({ "vector": vs(sub.basis().row(i)), "type": amb.vector_type(sub.basis().row(i))?.to_string() })))
            .collect::<CliResult<Vec<_>>>()?;
        let neg = l.lattice.rank() == 0 || l.lattice.is_negative_definite();
        let mut v = json!({
            "label": l.label,
            "reference": reference,
            "basis_types": types,
            "negative_definite": neg,
        });
        if neg {
            v["pex"] = screening(&is_pex_free(&sub, &spec)?, &reference);
            if !pex_only {
                v["wall"] = screening(&is_wall_free(&sub, &spec)?, &reference);
            }
        }
        return Ok(v);
    }
    let (label, g) = load_group(file)?;
    let r = symplectic_check(&g, &spec)?;
    let reference = "lattice of the group".to_string();
    let mut v = json!({
        "label": label,
        "stable": r.stable,
        "negative_definite_coinvariant": r.neg_def_coinv,
        "symplectic": r.symplectic,
        "coinvariant": sublattice_report(&r.coinvariant)?,
        "pex": r.pex.as_ref().map(|p| screening(p, &reference)),
    });
    if !pex_only {
        v["wall"] = r.wall.as_ref().map_or(Value::Null, |w| screening(w, &reference));
    }
    Ok(v)
}

fn guarantee(g: Guarantee) -> &'static str {
    match g {
        Guarantee::Exact => "exact",
        Guarantee::ExistenceOnly => "existence-only",
    }
}

fn embedding_report(e: &EmbeddingResult, m: &Lattice) -> CliResult<Value> {
    let k = e.complement.as_lattice()?;
    let lhs = m.det() * k.det();
    let rhs = e.ambient.det() * &e.glue_order * &e.glue_order;
    let mut v = json!({
        "guarantee": guarantee(e.guarantee),
        "glued_model": e.glued_model,
        "glue_order": e.glue_order.to_string(),
        "image": rows(e.image.basis()),
        "complement": sublattice_report(&e.complement)?,
        "det_identity": lhs == rhs,
    });
    if e.glued_model {
        v["ambient_gram"] = rows(e.ambient.gram());
    }
    Ok(v)
}

fn embed(m: &Loaded, l: &Loaded) -> CliResult<Value> {
    let res = primitive_embeddings(&m.lattice, &l.lattice, &EmbedOptions::default())?;
    let list = res.iter().map(|e| embedding_report(e, &m.lattice)).collect::<CliResult<Vec<_>>>()?;
    Ok(json!({
        "source": m.label,
        "target": l.label,
        "orbits": list.len().to_string(),
        "embeddings": list,
    }))
}

fn overlat(l: &Loaded) -> CliResult<Value> {
    let list: Vec<Value> = even_overlattices(&l.lattice, EmbedOptions::default().group_cap)?
        .iter()
        .filter(|o| !o.index.is_one())
        .map(|o| {
            json!({
                "index": o.index.to_string(),
                "gram": rows(o.lattice.gram()),
                "basis": (0..o.basis.nrows()).map(|i| vs(o.basis.row(i))).collect::<Vec<_>>(),
                "glue": o.glue.iter().map(|g| vs(g)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({ "label": l.label, "proper": list.len().to_string(), "overlattices": list }))
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::Input(format!("{what}: `{x}` is not an integer"))))
        .collect()
}

fn position(p: Position) -> &'static str {
    match p {
        Position::Interior => "interior",
        Position::Boundary => "boundary",
        Position::Outside => "outside",
    }
}

fn vinberg(
    l: &Loaded,
    controller: &str,
    squares: &str,
    scan_words: Option<usize>,
    extra: &[String],
    opts: &VinbergOptions,
) -> CliResult<Value> {
    let h = parse_list(controller, "controller")?;
    let sq = parse_list(squares, "squares")?;
    let extra: Vec<Vec<Int>> = extra
        .iter()
        .map(|e| Ok(parse_list(e, "extra")?.into_iter().map(Int::from).collect()))
        .collect::<CliResult<_>>()?;
    let c = fundamental_chamber(&l.lattice, &h, &sq, opts)?;
    let lat = &c.lattice;
    let walls: Vec<Value> = c
        .walls
        .iter()
        .map(|w| json!({ "root": vs(w), "square": lat.square(w).to_string() }))
        .collect();
    let mut v = json!({
        "label": l.label,
        "controller": vs(&c.controller),
        "perturbed": c.perturbed,
        "complete": c.complete,
        "walls": walls,
    });
    if lat.rank() == 2 {
        let orth: Vec<Value> = wall_orthogonals(&c)?
            .iter()
            .map(|w| json!({ "vector": vs(w), "square": lat.square(w).to_string() }))
            .collect();
        v["wall_orthogonals"] = Value::Array(orth);
    }
    let mut relations = Vec::new();
    for d in &extra {
        let plus: Vec<Int> = c.controller.iter().zip(d).map(|(a, b)| a + b).collect();
        let minus: Vec<Int> = c.controller.iter().zip(d).map(|(a, b)| a - b).collect();
        let two = Int::from(2);
        if plus.iter().chain(&minus).any(|x| x % &two != Int::from(0)) {
            continue;
        }
        let half = |v: &[Int]| v.iter().map(|x| x / &two).collect::<Vec<_>>();
        let (rp, rd, rm) = (reflection(&half(&plus), lat)?, reflection(d, lat)?, reflection(&half(&minus), lat)?);
        relations.push(json!({
            "d": vs(d),
            "holds": check_relation(&[rp, rd.clone()], &[rd, rm]),
        }));
    }
    if !relations.is_empty() {
        v["relations"] = Value::Array(relations);
    }
    if let Some(k) = scan_words {
        let scan = reflection_word_scan(&c, &extra, k)?;
        let words: Vec<Value> = scan
            .words
            .iter()
            .map(|w| {
                json!({
                    "word": w.word.iter().map(|i| format!("s{i}")).collect::<Vec<_>>().join(" "),
                    "image": vs(&w.image),
                    "position": position(w.position),
                })
            })
            .collect();
        let extras: Vec<Value> = scan
            .extras
            .iter()
            .map(|e| {
                json!({
                    "vector": vs(&e.vector),
                    "fixes_controller": e.fixes_controller,
                    "preserves_chamber": e.preserves_chamber,
                })
            })
            .collect();
        v["scan"] = json!({
            "max_length": k.to_string(),
            "words": words,
            "all_outside": scan.all_outside,
            "extras": extras,
        });
    }
    Ok(v)
}

fn parse_place(p: &str) -> CliResult<Place> {
    if p == "inf" {
        return Ok(Place::Infinity);
    }
    let n: u64 = p.parse().map_err(|_| CliError::Input(format!("--p: `{p}` is not a prime or `inf`")))?;
    if n < 2 || prime_factors(&Int::from(n))? != vec![n] {
        return Err(CliError::Input(format!("--p: `{p}` is not a prime")));
    }
    Ok(Place::Prime(n))
}

fn verdict(iso: bool) -> &'static str {
    if iso {
        "isotropic"
    } else {
        "anisotropic"
    }
}

fn isotropy(l: &Loaded, p: Option<&str>, all: bool) -> CliResult<Value> {
    if all {
        let places: Vec<Value> = relevant_places(&l.lattice)?
            .into_iter()
            .map(|pl| json!({ "place": pl.to_string(), "verdict": verdict(is_isotropic(&l.lattice, pl)) }))
            .collect();
        let ok = places.iter().all(|v| v["verdict"] == "isotropic");
        return Ok(json!({
            "label": l.label,
            "places": places,
            "rescaled_u_possible": ok,
        }));
    }
    let place = parse_place(p.unwrap_or_default())?;
    Ok(json!({
        "label": l.label,
        "place": place.to_string(),
        "verdict": verdict(is_isotropic(&l.lattice, place)),
    }))
}

fn pipeline(file: &Path, polarize: Option<&str>, box_bound: u64) -> CliResult<Value> {
    let f = parse_leech_pair_file(&read(file)?)?;
    let c = load_ref(&f.lattice, file)?;
    let label = f.label.clone().unwrap_or_else(|| stem(file));
    let n = f.n.unwrap_or(3);
    let spec = WallSpec::for_n(n)?;
    let (ambient, ambient_label) = match &f.ambient {
        Some(s) => (spec_lattice(s)?, spec_label(s)),
        None => (k3n_lattice(n)?, format!("K3[{n}]")),
    };
    let pol = polarize
        .map(|s| {
            let v = parse_list(s, "polarize")?;
            match v[..] {
                [sq, d] => Ok(VectorType::new(sq, d)),
                _ => Err(CliError::Input("--polarize expects `square,divisibility`".into())),
            }
        })
        .transpose()?;
    let input = LeechPairInput::new(c.lattice.clone(), f.generators.clone(), label.clone())?;
    let opts = EmbedOptions::default();
    let results = classify_leech_pair(&input, &ambient, &spec, &opts)?;
    let reference = format!("{ambient_label} (or the glued model where marked)");
    let mut orbits = Vec::new();
    for r in &results {
        orbits.push(json!({
            "embedding": embedding_report(&r.embedding, input.lattice())?,
            "pex": screening(&r.pex, &reference),
            "wall": screening(&r.wall, &reference),
            "extended_generators": r.extended_generators.len().to_string(),
            "extended_order": r.extended_order.to_string(),
            "stable_certificate": r.stable_certificate,
        }));
    }
    let input_order = input.group.order(DEFAULT_ELEMENT_CAP)?;
    let mut v = json!({
        "label": label,
        "ambient": ambient_label,
        "coinvariant_rank": input.lattice().rank().to_string(),
        "input_order": input_order.to_string(),
        "orbits": orbits,
    });
    if let Some(t) = pol {
        let entries: Vec<Value> = polarized_report(&results, &t, box_bound)?
            .iter()
            .map(|e| {
                json!({
                    "orbit": e.embedding.to_string(),
                    "vector": vs(&e.vector),
                    "transcendental": rows(e.transcendental.gram()),
                })
            })
            .collect();
        v["polarized"] = json!({ "type": t.to_string(), "reference": reference, "classes": entries });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("hklattice").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn temp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("hklattice-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn genus_string() {
        let p = temp("e8.json", "{\n  \"gram\": \"E8\"\n}\n");
        let (code, out, _) = run_str(&["genus", p.to_str().unwrap(), "--string"]);
        assert_eq!(code, 0);
        assert_eq!(out, "II_(0,8)\n");
    }

    #[test]
    fn vinberg_walls() {
        let p = temp("ns.json", "{\n  \"gram\": [\n    [4, 2],\n    [2, -2]\n  ]\n}\n");
        let (code, out, _) = run_str(&["vinberg", p.to_str().unwrap(), "--controller", "1,0", "--squares", "-2"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"(0,1)\"") && out.contains("\"(1,-1)\""));
    }

    #[test]
    fn exit_codes() {
        let bad = temp("degenerate.json", "{\n  \"gram\": [\n    [2, 2],\n    [2, 2]\n  ]\n}\n");
        let (code, _, err) = run_str(&["info", bad.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(err.contains("Degenerate"));
        let junk = temp("junk.json", "{ \"gram\": [[2, 1], [1");
        assert_eq!(run_str(&["info", junk.to_str().unwrap()]).0, 2);
        assert_eq!(run_str(&["info", "/nonexistent/file.json"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
    }
}
