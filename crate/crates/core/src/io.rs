//! JSON description files. Every number is a string `"p/q"` (or `"p"`) so
//! values stay exact; matrices are lists of rows.
//!
//! A document carries a `"kind"` tag:
//!
//! ```json
//! { "kind": "algebra",
//!   "base": { "labels": ["1"], "unit": ["1"], "mult": [[["1"]]] },
//!   "rank": 3,
//!   "brackets": [ { "i": 0, "j": 1, "value": ["0", "0", "1"] } ],
//!   "anchors": [ [["0"]], [["0"]], [["0"]] ] }
//! ```
//!
//! `brackets` lists `[e_i, e_j]` for `i < j` in rational coordinates
//! (`rank * dim(base)` entries); missing pairs are zero. `anchors` gives the
//! matrix of the derivation `a(e_i)` of the base. A `"coupling"` document has
//! algebras `b` and `l` plus one operator `{ "matrix", "symbol" }` per
//! generator of `b` (`symbol` may be omitted for zero) and optionally `rho`,
//! the coefficients of an `l`-valued 2-form that makes the operators a
//! lifting pair. A `"nerve_coupling"`
//! document has `vertex_count`, `maximal` simplices and one coupling per
//! vertex. An `"extension"` document has algebras `b`, `l` and `total`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cech::{Nerve, NerveCoupling};
use crate::extension::{Coupling, ExtensionStructure, LiftingPair};
use crate::linalg::{format_rational, is_zero_vec, parse_rational, MatrixQ, Rational, Vector};
use crate::lr::{BaseAlgebra, Cochain, Connection, Derivation, FirstOrderOp, LieRinehart};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("empty input")]
    Empty,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("shape error in {context}: {message}")]
    Shape { context: String, message: String },
    #[error("semantic error: {0}")]
    Semantic(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseFile {
    pub labels: Vec<String>,
    pub unit: Vec<String>,
    pub mult: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub value: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub base: BaseFile,
    pub rank: usize,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    pub anchors: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingFile {
    pub b: AlgebraFile,
    pub l: AlgebraFile,
    pub outer: Vec<OperatorFile>,
    /// A chosen `ρ` completing the given operators to a lifting pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveCouplingFile {
    pub vertex_count: usize,
    pub maximal: Vec<Vec<usize>>,
    pub local: Vec<CouplingFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionFile {
    pub b: AlgebraFile,
    pub l: AlgebraFile,
    pub total: AlgebraFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Algebra(AlgebraFile),
    Coupling(CouplingFile),
    NerveCoupling(NerveCouplingFile),
    Extension(ExtensionFile),
}

pub fn parse_document(text: &str) -> Result<Document, IoError> {
    if text.trim().is_empty() {
        return Err(IoError::Empty);
    }
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn to_json(doc: &Document) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

fn number(s: &str) -> Result<Rational, IoError> {
    parse_rational(s).ok_or_else(|| IoError::Number(s.to_string()))
}

fn vector(v: &[String], len: usize, context: &str) -> Result<Vector, IoError> {
    if v.len() != len {
        return Err(shape(context, format!("expected {len} entries, found {}", v.len())));
    }
    v.iter().map(|s| number(s)).collect()
}

fn matrix(rows: &[Vec<String>], r: usize, c: usize, context: &str) -> Result<MatrixQ, IoError> {
    if rows.len() != r {
        return Err(shape(context, format!("expected {r} rows, found {}", rows.len())));
    }
    let dense = rows.iter().map(|row| vector(row, c, context)).collect::<Result<Vec<_>, _>>()?;
    Ok(MatrixQ::from_rows(c, &dense))
}

fn shape(context: &str, message: String) -> IoError {
    IoError::Shape { context: context.to_string(), message }
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn matrix_strings(m: &MatrixQ) -> Vec<Vec<String>> {
    m.to_dense_rows().iter().map(|r| strings(r)).collect()
}

impl BaseFile {
    pub fn to_base(&self) -> Result<BaseAlgebra, IoError> {
        let d = self.labels.len();
        if d == 0 {
            return Err(shape("base", "no basis elements".into()));
        }
        let unit = vector(&self.unit, d, "base.unit")?;
        if self.mult.len() != d {
            return Err(shape("base.mult", format!("expected {d} rows, found {}", self.mult.len())));
        }
        let mult = self
            .mult
            .iter()
            .map(|row| {
                if row.len() != d {
                    return Err(shape("base.mult", format!("expected {d} entries per row, found {}", row.len())));
                }
                row.iter().map(|v| vector(v, d, "base.mult")).collect()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BaseAlgebra::new(self.labels.clone(), mult, unit))
    }

    pub fn from_base(r: &BaseAlgebra) -> Self {
        BaseFile {
            labels: r.basis_labels.clone(),
            unit: strings(&r.unit),
            mult: r.mult.iter().map(|row| row.iter().map(|v| strings(v)).collect()).collect(),
        }
    }
}

impl AlgebraFile {
    pub fn to_algebra(&self) -> Result<LieRinehart, IoError> {
        let base = self.base.to_base()?;
        let d = base.dim();
        let n = self.rank * d;
        let mut brackets = BTreeMap::new();
        for (k, b) in self.brackets.iter().enumerate() {
            let ctx = format!("brackets[{k}]");
            if b.i >= b.j || b.j >= self.rank {
                return Err(shape(&ctx, format!("need i < j < rank, found ({}, {})", b.i, b.j)));
            }
            brackets.insert((b.i, b.j), vector(&b.value, n, &ctx)?);
        }
        if self.anchors.len() != self.rank {
            return Err(shape("anchors", format!("expected {} anchors, found {}", self.rank, self.anchors.len())));
        }
        let anchors = self
            .anchors
            .iter()
            .enumerate()
            .map(|(i, a)| Ok(Derivation { matrix: matrix(a, d, d, &format!("anchors[{i}]"))? }))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(LieRinehart::from_basis_brackets(&base, self.rank, &brackets, &anchors))
    }

    pub fn from_algebra(a: &LieRinehart) -> Self {
        let mut brackets = Vec::new();
        for i in 0..a.rank {
            for j in i + 1..a.rank {
                let v = a.generator_bracket(i, j);
                if !is_zero_vec(&v) {
                    brackets.push(BracketEntry { i, j, value: strings(&v) });
                }
            }
        }
        AlgebraFile {
            base: BaseFile::from_base(&a.base),
            rank: a.rank,
            brackets,
            anchors: (0..a.rank).map(|i| matrix_strings(&a.anchor_of(&a.generator(i)).matrix)).collect(),
        }
    }
}

impl CouplingFile {
    pub fn to_coupling(&self) -> Result<Coupling, IoError> {
        let b = self.b.to_algebra()?;
        let l = self.l.to_algebra()?;
        let (n, d) = (l.dim(), l.base_dim());
        if self.outer.len() != b.rank {
            return Err(shape("outer", format!("expected {} operators, found {}", b.rank, self.outer.len())));
        }
        let ops = self
            .outer
            .iter()
            .enumerate()
            .map(|(i, op)| {
                let ctx = format!("outer[{i}]");
                let symbol = match &op.symbol {
                    Some(s) => Derivation { matrix: matrix(s, d, d, &ctx)? },
                    None => Derivation::zero(d),
                };
                Ok(FirstOrderOp { matrix: matrix(&op.matrix, n, n, &ctx)?, symbol })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Coupling::new(b, l, ops).map_err(|e| IoError::Semantic(e.to_string()))
    }

    pub fn from_coupling(c: &Coupling) -> Self {
        CouplingFile {
            b: AlgebraFile::from_algebra(&c.b),
            l: AlgebraFile::from_algebra(&c.l),
            outer: c
                .outer
                .iter()
                .map(|op| OperatorFile {
                    matrix: matrix_strings(&op.matrix),
                    symbol: (!op.symbol.is_zero()).then(|| matrix_strings(&op.symbol.matrix)),
                })
                .collect(),
            rho: None,
        }
    }

    pub fn from_pair(c: &Coupling, pair: &LiftingPair) -> Self {
        let mut f = Self::from_coupling(c);
        f.outer = pair
            .alpha
            .ops
            .iter()
            .map(|op| OperatorFile {
                matrix: matrix_strings(&op.matrix),
                symbol: (!op.symbol.is_zero()).then(|| matrix_strings(&op.symbol.matrix)),
            })
            .collect();
        f.rho = Some(strings(&pair.rho.values));
        f
    }

    /// The lifting pair `(outer, rho)` when `rho` is given.
    pub fn lifting_pair(&self, c: &Coupling) -> Result<Option<LiftingPair>, IoError> {
        let Some(rho) = &self.rho else { return Ok(None) };
        let zero = Cochain::zero(c.b.rank, 2, c.l.dim());
        let values = vector(rho, zero.values.len(), "rho")?;
        let pair = LiftingPair {
            alpha: Connection { ops: c.outer.clone() },
            rho: Cochain::from_values(c.b.rank, 2, c.l.dim(), values),
        };
        let problems = c.check_pair(&pair);
        if problems.is_empty() {
            Ok(Some(pair))
        } else {
            Err(IoError::Semantic(problems.join("; ")))
        }
    }
}

impl NerveCouplingFile {
    pub fn to_nerve_coupling(&self) -> Result<NerveCoupling, IoError> {
        if self.vertex_count == 0 {
            return Err(shape("vertex_count", "a nerve needs at least one vertex".into()));
        }
        for (k, s) in self.maximal.iter().enumerate() {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&v| v >= self.vertex_count) {
                return Err(shape(&format!("maximal[{k}]"), "simplices are increasing vertex lists".into()));
            }
        }
        if self.local.len() != self.vertex_count {
            return Err(shape(
                "local",
                format!("expected {} couplings, found {}", self.vertex_count, self.local.len()),
            ));
        }
        let nerve = Nerve::from_maximal(self.vertex_count, &self.maximal);
        let local = self.local.iter().map(CouplingFile::to_coupling).collect::<Result<Vec<_>, _>>()?;
        NerveCoupling::new(nerve, local).map_err(|e| IoError::Semantic(e.to_string()))
    }

    pub fn from_nerve_coupling(nc: &NerveCoupling) -> Self {
        let nerve = &nc.nerve;
        let mut maximal = Vec::new();
        for p in (0..=nerve.dim()).rev() {
            for s in nerve.simplices(p) {
                let covered = maximal.iter().any(|m: &Vec<usize>| s.iter().all(|v| m.contains(v)));
                if !covered {
                    maximal.push(s.clone());
                }
            }
        }
        maximal.sort();
        NerveCouplingFile {
            vertex_count: nerve.vertex_count,
            maximal,
            local: nc.local.iter().map(CouplingFile::from_coupling).collect(),
        }
    }
}

impl ExtensionFile {
    pub fn to_extension(&self) -> Result<ExtensionStructure, IoError> {
        let e =
            ExtensionStructure { b: self.b.to_algebra()?, l: self.l.to_algebra()?, total: self.total.to_algebra()? };
        let problems = e.validate();
        if problems.is_empty() {
            Ok(e)
        } else {
            Err(IoError::Semantic(problems.join("; ")))
        }
    }

    pub fn from_extension(e: &ExtensionStructure) -> Self {
        ExtensionFile {
            b: AlgebraFile::from_algebra(&e.b),
            l: AlgebraFile::from_algebra(&e.l),
            total: AlgebraFile::from_algebra(&e.total),
        }
    }
}
