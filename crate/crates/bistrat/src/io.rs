//! Document formats and their (de)serialization.
//!
//! A bisheaf document is a JSON object with the following shape:
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "p": 2,
//!   "complex": [[0, 1], [1, 2]],
//!   "stalks":       { "0": 1, "0,1": 1 },
//!   "costalks":     { "0": 1, "0,1": 1 },
//!   "restrictions": { "0 < 0,1": [1] },
//!   "extensions":   { "0 < 0,1": [1] },
//!   "verticals":    { "0": [1] }
//! }
//! ```
//!
//! `complex` lists maximal simplices; the parser takes their face closure.
//! Simplices are keyed by their comma-joined sorted vertex list and covering
//! relations by `face < coface`. Matrix values are row-major integer arrays,
//! reduced mod `p` on parse (negative entries are allowed). Omitted stalk or
//! costalk dimensions default to 0, omitted matrices to the zero matrix of
//! the declared shape. The serializer always writes every entry explicitly,
//! so serialization is canonical and parse/serialize round-trips are exact.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bisheaf::{Bisheaf, BisheafError};
use crate::complex::{Complex, ComplexError, Simplex};
use crate::field::{is_prime, FieldMatrix};
use crate::stratify::Stratification;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported schema version {0:?} (expected {SCHEMA_VERSION:?})")]
    SchemaVersion(String),
    #[error("modulus {0} is not prime")]
    NonPrime(u64),
    #[error("bad key {key:?}: {reason}")]
    BadKey { key: String, reason: String },
    #[error("unknown simplex reference {0:?}")]
    UnknownSimplex(String),
    #[error("{0:?} is not a covering relation of the complex")]
    NotCovering(String),
    #[error("{what} at {at:?} has {found} entries, expected {rows}x{cols}")]
    Shape {
        what: &'static str,
        at: String,
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Bisheaf(#[from] BisheafError),
    #[error("bisheaf fails validation: {}", .0.join("; "))]
    Validation(Vec<String>),
}

/// The on-disk form of a bisheaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BisheafDocument {
    pub schema_version: String,
    pub p: u64,
    pub complex: Vec<Vec<u32>>,
    #[serde(default)]
    pub stalks: BTreeMap<String, usize>,
    #[serde(default)]
    pub costalks: BTreeMap<String, usize>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    pub extensions: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    pub verticals: BTreeMap<String, Vec<i64>>,
}

fn simplex_key(s: &Simplex) -> String {
    s.to_string()
}

fn relation_key(face: &Simplex, coface: &Simplex) -> String {
    format!("{face} < {coface}")
}

fn parse_simplex_key(key: &str) -> Result<Simplex, ParseError> {
    let verts: Result<Vec<u32>, _> = key.trim().split(',').map(|v| v.trim().parse()).collect();
    let verts = verts.map_err(|e| ParseError::BadKey {
        key: key.to_string(),
        reason: e.to_string(),
    })?;
    Simplex::new(verts).map_err(|e| ParseError::BadKey {
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn resolve(c: &Complex, key: &str) -> Result<usize, ParseError> {
    let s = parse_simplex_key(key)?;
    c.index_of(&s)
        .ok_or_else(|| ParseError::UnknownSimplex(key.trim().to_string()))
}

fn resolve_relation(c: &Complex, key: &str) -> Result<(usize, usize), ParseError> {
    let (left, right) = key.split_once('<').ok_or_else(|| ParseError::BadKey {
        key: key.to_string(),
        reason: "expected `face < coface`".to_string(),
    })?;
    Ok((resolve(c, left)?, resolve(c, right)?))
}

/// Deserializes the document text without interpreting it.
pub fn parse_document(text: &str) -> Result<BisheafDocument, ParseError> {
    let doc: BisheafDocument =
        serde_json::from_str(text).map_err(|e| ParseError::Syntax(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ParseError::SchemaVersion(doc.schema_version));
    }
    Ok(doc)
}

/// Builds the complex and bisheaf a document describes, checking structure
/// and shapes but not the algebraic laws.
pub fn build_unvalidated(doc: &BisheafDocument) -> Result<Bisheaf, ParseError> {
    if !is_prime(doc.p) {
        return Err(ParseError::NonPrime(doc.p));
    }
    let complex = Arc::new(Complex::build(&doc.complex)?);
    let n = complex.len();

    let mut stalk_dims = vec![0usize; n];
    for (key, &dim) in &doc.stalks {
        stalk_dims[resolve(&complex, key)?] = dim;
    }
    let mut costalk_dims = vec![0usize; n];
    for (key, &dim) in &doc.costalks {
        costalk_dims[resolve(&complex, key)?] = dim;
    }

    let matrix = |what: &'static str,
                  at: &str,
                  rows: usize,
                  cols: usize,
                  entries: Option<&Vec<i64>>|
     -> Result<FieldMatrix, ParseError> {
        match entries {
            None => Ok(FieldMatrix::zeros(doc.p, rows, cols).expect("prime checked")),
            Some(e) => {
                FieldMatrix::from_entries(doc.p, rows, cols, e).map_err(|_| ParseError::Shape {
                    what,
                    at: at.to_string(),
                    rows,
                    cols,
                    found: e.len(),
                })
            }
        }
    };

    let mut restriction_entries: BTreeMap<(usize, usize), &Vec<i64>> = BTreeMap::new();
    for (key, entries) in &doc.restrictions {
        let (f, cf) = resolve_relation(&complex, key)?;
        if complex.covering_index(f, cf).is_none() {
            return Err(ParseError::NotCovering(key.clone()));
        }
        restriction_entries.insert((f, cf), entries);
    }
    let mut extension_entries: BTreeMap<(usize, usize), &Vec<i64>> = BTreeMap::new();
    for (key, entries) in &doc.extensions {
        let (f, cf) = resolve_relation(&complex, key)?;
        if complex.covering_index(f, cf).is_none() {
            return Err(ParseError::NotCovering(key.clone()));
        }
        extension_entries.insert((f, cf), entries);
    }

    let mut restrictions = Vec::new();
    let mut extensions = Vec::new();
    for &(f, cf) in complex.covering_relations() {
        let at = relation_key(complex.simplex(f), complex.simplex(cf));
        restrictions.push(matrix(
            "restriction",
            &at,
            stalk_dims[cf],
            stalk_dims[f],
            restriction_entries.get(&(f, cf)).copied(),
        )?);
        extensions.push(matrix(
            "extension",
            &at,
            costalk_dims[f],
            costalk_dims[cf],
            extension_entries.get(&(f, cf)).copied(),
        )?);
    }

    let mut vertical_entries: BTreeMap<usize, &Vec<i64>> = BTreeMap::new();
    for (key, entries) in &doc.verticals {
        vertical_entries.insert(resolve(&complex, key)?, entries);
    }
    let mut verticals = Vec::new();
    for i in 0..n {
        verticals.push(matrix(
            "vertical",
            &simplex_key(complex.simplex(i)),
            costalk_dims[i],
            stalk_dims[i],
            vertical_entries.get(&i).copied(),
        )?);
    }

    Ok(Bisheaf::new(
        complex,
        doc.p,
        stalk_dims,
        costalk_dims,
        restrictions,
        extensions,
        verticals,
    )?)
}

/// Full parse: document text to a validated bisheaf. Violations of the
/// bisheaf axioms are reported in the error.
pub fn parse(text: &str) -> Result<Bisheaf, ParseError> {
    let b = parse_unvalidated(text)?;
    let violations = b.validate();
    if violations.is_empty() {
        Ok(b)
    } else {
        let c = b.complex();
        Err(ParseError::Validation(
            violations.iter().map(|v| v.describe(c)).collect(),
        ))
    }
}

/// Parse without running the bisheaf validator; structure and shapes are
/// still checked.
pub fn parse_unvalidated(text: &str) -> Result<Bisheaf, ParseError> {
    build_unvalidated(&parse_document(text)?)
}

/// The canonical document of a bisheaf: every dimension, matrix and
/// vertical written explicitly, keys sorted.
pub fn to_document(b: &Bisheaf) -> BisheafDocument {
    let c = b.complex();
    let maximal: Vec<Vec<u32>> = (0..c.len())
        .filter(|&i| c.covering_cofaces(i).is_empty())
        .map(|i| c.simplex(i).vertices().to_vec())
        .collect();
    let entries_of = |m: &FieldMatrix| m.entries().iter().map(|&e| e as i64).collect();
    let mut doc = BisheafDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        p: b.modulus(),
        complex: maximal,
        stalks: BTreeMap::new(),
        costalks: BTreeMap::new(),
        restrictions: BTreeMap::new(),
        extensions: BTreeMap::new(),
        verticals: BTreeMap::new(),
    };
    for i in 0..c.len() {
        let key = simplex_key(c.simplex(i));
        doc.stalks.insert(key.clone(), b.stalk_dim(i));
        doc.costalks.insert(key.clone(), b.costalk_dim(i));
        doc.verticals.insert(key, entries_of(b.vertical(i)));
    }
    for (k, &(f, cf)) in c.covering_relations().iter().enumerate() {
        let key = relation_key(c.simplex(f), c.simplex(cf));
        doc.restrictions.insert(key.clone(), entries_of(b.restriction(k)));
        doc.extensions.insert(key, entries_of(b.extension(k)));
    }
    doc
}

/// Pretty-printed JSON with a trailing newline; byte-deterministic.
pub fn serialize_document(doc: &BisheafDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serializes");
    text.push('\n');
    text
}

/// The on-disk form of a stratification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratificationDocument {
    pub schema_version: String,
    pub strata: Vec<StratumRecord>,
    pub filtration: Vec<FiltrationLevel>,
    pub frontier: Vec<(usize, usize)>,
    pub labels: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub id: usize,
    pub dimension: usize,
    pub simplices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationLevel {
    pub level: isize,
    pub simplices: Vec<String>,
}

/// Serializable view of a stratification.
pub fn stratification_document(s: &Stratification) -> StratificationDocument {
    let c = s.complex();
    let strata = s
        .strata()
        .iter()
        .enumerate()
        .map(|(id, st)| StratumRecord {
            id,
            dimension: st.dimension,
            simplices: st
                .simplices
                .iter()
                .map(|&i| simplex_key(c.simplex(i)))
                .collect(),
        })
        .collect();
    let filtration = (-1..=c.dimension())
        .map(|level| FiltrationLevel {
            level,
            simplices: s
                .mask_at_level(level)
                .members()
                .into_iter()
                .map(|i| simplex_key(c.simplex(i)))
                .collect(),
        })
        .collect();
    let labels = (0..c.len())
        .map(|i| (simplex_key(c.simplex(i)), s.stratum_of(i)))
        .collect();
    StratificationDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        strata,
        filtration,
        frontier: s.frontier().iter().copied().collect(),
        labels,
    }
}

/// Pretty-printed JSON with a trailing newline; byte-deterministic.
pub fn serialize_stratification(doc: &StratificationDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serializes");
    text.push('\n');
    text
}
