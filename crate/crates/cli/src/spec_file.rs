//! The mapping-spec JSON file: a versioned document carrying the monomials
//! of `h` and `g`.
//!
//! Parsing canonicalizes the polynomial maps (sorted terms, merged
//! duplicates, zero coefficients dropped, per-variable degree cap 16), so
//! serializing a parsed file is byte-stable.

use num_complex::Complex;
use pluriharm::poly::{Monomial, PolyMap};
use pluriharm::PolyMap64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSpecFile {
    pub schema: u32,
    pub n: usize,
    pub h: Vec<MonomialRecord>,
    pub g: Vec<MonomialRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialRecord {
    pub component: usize,
    pub exponents: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed mapping spec: {0}")]
    Parse(String),
    #[error("invalid mapping spec ({context}): {detail}")]
    Validation { context: String, detail: String },
}

/// A parsed spec: canonical polynomial maps plus the optional metadata.
#[derive(Clone, Debug)]
pub struct ParsedSpec {
    pub n: usize,
    pub h: PolyMap64,
    pub g: PolyMap64,
    pub metadata: Option<Metadata>,
}

fn records_to_map(n: usize, records: &[MonomialRecord], which: &str) -> Result<PolyMap64, SpecError> {
    let terms: Vec<Monomial<f64>> = records
        .iter()
        .map(|r| Monomial::new(r.component, r.exponents.clone(), Complex::new(r.re, r.im)))
        .collect();
    PolyMap::new(n, terms).map_err(|e| SpecError::Validation {
        context: format!("field `{which}`"),
        detail: e.to_string(),
    })
}

/// Parses and validates a mapping-spec document.
pub fn parse_spec(text: &str) -> Result<ParsedSpec, SpecError> {
    let file: MappingSpecFile =
        serde_json::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
    if file.schema != SCHEMA_VERSION {
        return Err(SpecError::Validation {
            context: "field `schema`".to_string(),
            detail: format!("unsupported schema version {}", file.schema),
        });
    }
    let h = records_to_map(file.n, &file.h, "h")?;
    let g = records_to_map(file.n, &file.g, "g")?;
    Ok(ParsedSpec {
        n: file.n,
        h,
        g,
        metadata: file.metadata,
    })
}

fn map_to_records(map: &PolyMap64) -> Vec<MonomialRecord> {
    map.terms()
        .iter()
        .map(|t| MonomialRecord {
            component: t.component,
            exponents: t.exponents.clone(),
            re: t.coefficient.re,
            im: t.coefficient.im,
        })
        .collect()
}

/// Canonical serialization of a parsed spec; `parse(serialize(spec))`
/// round-trips byte-identically.
pub fn to_canonical_json(spec: &ParsedSpec) -> String {
    let file = MappingSpecFile {
        schema: SCHEMA_VERSION,
        n: spec.n,
        h: map_to_records(&spec.h),
        g: map_to_records(&spec.g),
        metadata: spec.metadata.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("spec file serializes");
    out.push('\n');
    out
}
