//! Text file formats for lattices, isometry groups and Leech pairs.
//!
//! All files are JSON objects with a fixed key order. Integers are written
//! as JSON numbers of arbitrary size. A matrix is an array of integer rows.
//!
//! Lattice file:
//!
//! ```text
//! {
//!   "label": "NS",
//!   "gram": [
//!     [4, 2],
//!     [2, -2]
//!   ]
//! }
//! ```
//!
//! Keys: `label` (optional string), `gram` (matrix or a lattice name such as
//! `"E8"` or `"U^2 + [-4]"`), `ambient` (optional name or matrix) and `basis`
//! (optional rows in ambient coordinates). With `basis` the file describes a
//! sublattice and `gram` may be omitted; when present it must equal the Gram
//! matrix of the basis. A `basis` without `ambient` refers to a lattice
//! supplied elsewhere, such as the `FILE` argument of `typevecs`.
//!
//! Group file: `label` (optional), `lattice` (inline lattice object or a
//! path relative to the group file), `generators` (array of matrices acting
//! on column vectors).
//!
//! Leech pair file: `label` (optional), `lattice` (the coinvariant lattice,
//! inline or path), `generators`, `n` (optional, default 3) and `ambient`
//! (optional name or matrix, default `K3[n]`).
//!
//! [`print_lattice_file`], [`print_group_file`] and [`print_leech_pair_file`]
//! are canonical: a file they produce parses back to the same value and
//! prints to the same bytes.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::matrix::{Int, IntMatrix};

/// A malformed file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct FormatError(pub String);

type Parsed<T> = std::result::Result<T, FormatError>;

fn fail<T>(msg: impl Into<String>) -> Parsed<T> {
    Err(FormatError(msg.into()))
}

/// A lattice given by name or by Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeSpec {
    Name(String),
    Gram(IntMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeFile {
    pub label: Option<String>,
    pub gram: Option<LatticeSpec>,
    pub ambient: Option<LatticeSpec>,
    pub basis: Option<IntMatrix>,
}

/// An inline lattice or a path to a lattice file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeRef {
    Inline(LatticeFile),
    Path(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFile {
    pub label: Option<String>,
    pub lattice: LatticeRef,
    pub generators: Vec<IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeechPairFile {
    pub label: Option<String>,
    pub lattice: LatticeRef,
    pub generators: Vec<IntMatrix>,
    pub n: Option<i64>,
    pub ambient: Option<LatticeSpec>,
}

/// Which kind of document a JSON object is, judged by its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Lattice,
    Group,
    LeechPair,
}

fn parse_object(text: &str) -> Parsed<Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => fail("top level must be an object"),
        Err(e) => fail(format!("line {} column {}: {}", e.line(), e.column(), e)),
    }
}

pub fn detect_kind(text: &str) -> Parsed<FileKind> {
    let m = parse_object(text)?;
    Ok(if !m.contains_key("generators") {
        FileKind::Lattice
    } else if m.contains_key("n") || m.contains_key("ambient") {
        FileKind::LeechPair
    } else {
        FileKind::Group
    })
}

fn check_keys(m: &Map<String, Value>, allowed: &[&str]) -> Parsed<()> {
    for k in m.keys() {
        if !allowed.contains(&k.as_str()) {
            return fail(format!("unknown key `{k}`"));
        }
    }
    let mut last = None;
    for k in m.keys() {
        let pos = allowed.iter().position(|a| a == k).unwrap();
        if last.is_some_and(|l| l > pos) {
            return fail(format!("key `{k}` out of order (expected {})", allowed.join(", ")));
        }
        last = Some(pos);
    }
    Ok(())
}

fn parse_int(v: &Value, what: &str) -> Parsed<Int> {
    match v {
        Value::Number(n) => Int::from_str(&n.to_string()).or_else(|_| fail(format!("{what}: `{n}` is not an integer"))),
        _ => fail(format!("{what}: expected an integer")),
    }
}

fn parse_row(v: &Value, what: &str) -> Parsed<Vec<Int>> {
    match v {
        Value::Array(xs) => xs.iter().map(|x| parse_int(x, what)).collect(),
        _ => fail(format!("{what}: expected an array of integers")),
    }
}

fn parse_matrix(v: &Value, what: &str) -> Parsed<IntMatrix> {
    let Value::Array(rows) = v else {
        return fail(format!("{what}: expected an array of rows"));
    };
    let rows: Vec<Vec<Int>> = rows.iter().map(|r| parse_row(r, what)).collect::<Parsed<_>>()?;
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return fail(format!("{what}: rows have different lengths"));
    }
    Ok(IntMatrix::from_rows_with_cols(rows, width))
}

fn parse_spec(v: &Value, what: &str) -> Parsed<LatticeSpec> {
    match v {
        Value::String(s) => Ok(LatticeSpec::Name(s.clone())),
        _ => Ok(LatticeSpec::Gram(parse_matrix(v, what)?)),
    }
}

fn parse_label(m: &Map<String, Value>) -> Parsed<Option<String>> {
    match m.get("label") {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => fail("label: expected a string"),
    }
}

fn lattice_from_map(m: &Map<String, Value>) -> Parsed<LatticeFile> {
    check_keys(m, &["label", "gram", "ambient", "basis"])?;
    let gram = m.get("gram").map(|v| parse_spec(v, "gram")).transpose()?;
    let ambient = m.get("ambient").map(|v| parse_spec(v, "ambient")).transpose()?;
    let basis = m.get("basis").map(|v| parse_matrix(v, "basis")).transpose()?;
    if ambient.is_some() && basis.is_none() {
        return fail("`ambient` requires `basis`");
    }
    if gram.is_none() && basis.is_none() {
        return fail("missing `gram`");
    }
    Ok(LatticeFile { label: parse_label(m)?, gram, ambient, basis })
}

fn parse_ref(v: &Value) -> Parsed<LatticeRef> {
    match v {
        Value::String(s) => Ok(LatticeRef::Path(s.clone())),
        Value::Object(m) => Ok(LatticeRef::Inline(lattice_from_map(m)?)),
        _ => fail("lattice: expected an object or a file path"),
    }
}

fn parse_generators(m: &Map<String, Value>) -> Parsed<Vec<IntMatrix>> {
    match m.get("generators") {
        Some(Value::Array(gs)) => gs.iter().map(|g| parse_matrix(g, "generators")).collect(),
        Some(_) => fail("generators: expected an array of matrices"),
        None => fail("missing `generators`"),
    }
}

pub fn parse_lattice_file(text: &str) -> Parsed<LatticeFile> {
    lattice_from_map(&parse_object(text)?)
}

pub fn parse_group_file(text: &str) -> Parsed<GroupFile> {
    let m = parse_object(text)?;
    check_keys(&m, &["label", "lattice", "generators"])?;
    let lattice = parse_ref(m.get("lattice").ok_or_else(|| FormatError("missing `lattice`".into()))?)?;
    Ok(GroupFile { label: parse_label(&m)?, lattice, generators: parse_generators(&m)? })
}

pub fn parse_leech_pair_file(text: &str) -> Parsed<LeechPairFile> {
    let m = parse_object(text)?;
    check_keys(&m, &["label", "lattice", "generators", "n", "ambient"])?;
    let lattice = parse_ref(m.get("lattice").ok_or_else(|| FormatError("missing `lattice`".into()))?)?;
    let n = match m.get("n") {
        None => None,
        Some(v) => Some(i64::try_from(parse_int(v, "n")?).or_else(|_| fail("n: out of range"))?),
    };
    let ambient = m.get("ambient").map(|v| parse_spec(v, "ambient")).transpose()?;
    Ok(LeechPairFile { label: parse_label(&m)?, lattice, generators: parse_generators(&m)?, n, ambient })
}

struct Printer {
    out: String,
}

impl Printer {
    fn indent(&mut self, level: usize) {
        for _ in 0..level {
            self.out.push_str("  ");
        }
    }

    fn row(&mut self, r: &[Int]) {
        self.out.push('[');
        for (i, x) in r.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            let _ = write!(self.out, "{x}");
        }
        self.out.push(']');
    }

    fn matrix(&mut self, m: &IntMatrix, level: usize) {
        if m.nrows() == 0 {
            self.out.push_str("[]");
            return;
        }
        self.out.push_str("[\n");
        for i in 0..m.nrows() {
            self.indent(level + 1);
            self.row(m.row(i));
            self.out.push_str(if i + 1 < m.nrows() { ",\n" } else { "\n" });
        }
        self.indent(level);
        self.out.push(']');
    }

    fn matrices(&mut self, ms: &[IntMatrix], level: usize) {
        if ms.is_empty() {
            self.out.push_str("[]");
            return;
        }
        self.out.push_str("[\n");
        for (i, m) in ms.iter().enumerate() {
            self.indent(level + 1);
            self.matrix(m, level + 1);
            self.out.push_str(if i + 1 < ms.len() { ",\n" } else { "\n" });
        }
        self.indent(level);
        self.out.push(']');
    }

    fn string(&mut self, s: &str) {
        self.out.push_str(&Value::String(s.to_string()).to_string());
    }

    fn spec(&mut self, s: &LatticeSpec, level: usize) {
        match s {
            LatticeSpec::Name(n) => self.string(n),
            LatticeSpec::Gram(g) => self.matrix(g, level),
        }
    }

    fn object(&mut self, fields: Vec<(&str, Box<dyn FnOnce(&mut Printer) + '_>)>, level: usize) {
        self.out.push_str("{\n");
        let n = fields.len();
        for (i, (key, body)) in fields.into_iter().enumerate() {
            self.indent(level + 1);
            self.string(key);
            self.out.push_str(": ");
            body(self);
            self.out.push_str(if i + 1 < n { ",\n" } else { "\n" });
        }
        self.indent(level);
        self.out.push('}');
    }

    fn lattice(&mut self, f: &LatticeFile, level: usize) {
        type Field<'a> = (&'a str, Box<dyn FnOnce(&mut Printer) + 'a>);
        let mut fields: Vec<Field> = Vec::new();
        if let Some(l) = &f.label {
            fields.push(("label", Box::new(move |p: &mut Printer| p.string(l))));
        }
        if let Some(g) = &f.gram {
            fields.push(("gram", Box::new(move |p: &mut Printer| p.spec(g, level + 1))));
        }
        if let Some(a) = &f.ambient {
            fields.push(("ambient", Box::new(move |p: &mut Printer| p.spec(a, level + 1))));
        }
        if let Some(b) = &f.basis {
            fields.push(("basis", Box::new(move |p: &mut Printer| p.matrix(b, level + 1))));
        }
        self.object(fields, level);
    }

    fn lattice_ref(&mut self, r: &LatticeRef, level: usize) {
        match r {
            LatticeRef::Inline(f) => self.lattice(f, level),
            LatticeRef::Path(p) => self.string(p),
        }
    }
}

pub fn print_lattice_file(f: &LatticeFile) -> String {
    let mut p = Printer { out: String::new() };
    p.lattice(f, 0);
    p.out.push('\n');
    p.out
}

pub fn print_group_file(f: &GroupFile) -> String {
    let mut p = Printer { out: String::new() };
    type Field<'a> = (&'a str, Box<dyn FnOnce(&mut Printer) + 'a>);
    let mut fields: Vec<Field> = Vec::new();
    if let Some(l) = &f.label {
        fields.push(("label", Box::new(move |p: &mut Printer| p.string(l))));
    }
    fields.push(("lattice", Box::new(|p: &mut Printer| p.lattice_ref(&f.lattice, 1))));
    fields.push(("generators", Box::new(|p: &mut Printer| p.matrices(&f.generators, 1))));
    p.object(fields, 0);
    p.out.push('\n');
    p.out
}

pub fn print_leech_pair_file(f: &LeechPairFile) -> String {
    let mut p = Printer { out: String::new() };
    type Field<'a> = (&'a str, Box<dyn FnOnce(&mut Printer) + 'a>);
    let mut fields: Vec<Field> = Vec::new();
    if let Some(l) = &f.label {
        fields.push(("label", Box::new(move |p: &mut Printer| p.string(l))));
    }
    fields.push(("lattice", Box::new(|p: &mut Printer| p.lattice_ref(&f.lattice, 1))));
    fields.push(("generators", Box::new(|p: &mut Printer| p.matrices(&f.generators, 1))));
    if let Some(n) = f.n {
        fields.push(("n", Box::new(move |p: &mut Printer| {
            let _ = write!(p.out, "{n}");
        })));
    }
    if let Some(a) = &f.ambient {
        fields.push(("ambient", Box::new(move |p: &mut Printer| p.spec(a, 1))));
    }
    p.object(fields, 0);
    p.out.push('\n');
    p.out
}
