use std::collections::BTreeMap;

use algebroid_core::io::IoError;
use algebroid_core::linalg::format_rational;
use algebroid_core::{Cochain, MatrixQ, Rational, Subquotient};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Fields are in alphabetical order, so a report is byte-identical to its
/// re-serialization as a generic JSON value.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: Option<String>,
    pub results: Value,
    pub status: &'static str,
}

impl RunReport {
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}

/// Either bad input (exit 2) or a mathematical failure that prevents the
/// computation from running (exit 1).
#[derive(Debug)]
pub enum CliError {
    Input(Value),
    Math(Value),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input(json!({ "kind": "input", "message": message.into() }))
    }

    pub fn math(message: impl Into<String>) -> Self {
        CliError::Math(json!({ "kind": "mathematical", "message": message.into() }))
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Parse { line, column, .. } => CliError::Input(json!({
                "kind": "parse",
                "line": line,
                "column": column,
                "message": e.to_string(),
            })),
            IoError::Empty => {
                CliError::Input(json!({ "kind": "parse", "line": 1, "column": 0, "message": e.to_string() }))
            }
            IoError::Semantic(_) => CliError::math(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

/// A computed payload and whether every check in it passed.
pub struct Outcome {
    pub results: Value,
    pub ok: bool,
}

pub fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn matrix(m: &MatrixQ) -> Value {
    serde_json::to_value(m).expect("matrices serialize")
}

pub fn cochain(c: &Cochain) -> Value {
    json!({ "degree": c.degree, "fiber_dim": c.fiber_dim, "values": vector(&c.values) })
}

pub fn forms(f: &BTreeMap<Vec<usize>, Cochain>) -> Value {
    Value::Array(f.iter().map(|(s, c)| json!({ "simplex": s, "form": cochain(c) })).collect())
}

pub fn classes(s: &Subquotient) -> Value {
    json!({ "dim": s.dim(), "representatives": s.representative_basis.iter().map(|v| vector(v)).collect::<Vec<_>>() })
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}
