//! JSON lattice files.
//!
//! ```json
//! {"d": -17, "rank": 2,
//!  "gram": [[["102","0"],["0","1"]], [["0","-1"],["0","0"]]],
//!  "pseudo_basis": [{"ideal": {"den": "1", "hnf": [["1","0"],["0","1"]]},
//!                    "vector": [["1","0"],["0","0"]]}, ...]}
//! ```
//!
//! A field entry `["a","b"]` is `a + b sqrt(d)`. An ideal is
//! `(1/den) (Z n + Z (r + s omega))` for `hnf = [[n, 0], [r, s]]`, with
//! `omega` the standard generator of `O`. Without `pseudo_basis` the lattice
//! is `O^rank` on the standard basis.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::arith::{fmt_rational, parse_rational, Rat};
use crate::error::{Error, Result};
use crate::field::{FieldElement, QuadField};
use crate::ideal::FracIdeal;
use crate::lattice::{HermLattice, HermSpace};

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::input(format!("{path}: {msg}"))
}

fn rational(v: &Value, path: &str) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| at(path, e)),
        Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(n.as_i64().unwrap().into())),
        _ => Err(at(path, "expected a rational written as a string \"p/q\" or an integer")),
    }
}

fn array<'a>(v: &'a Value, path: &str, len: Option<usize>) -> Result<&'a Vec<Value>> {
    let a = v.as_array().ok_or_else(|| at(path, "expected an array"))?;
    if let Some(n) = len {
        if a.len() != n {
            return Err(at(path, format!("expected {n} entries, found {}", a.len())));
        }
    }
    Ok(a)
}

fn element(field: QuadField, v: &Value, path: &str) -> Result<FieldElement> {
    let pair = array(v, path, Some(2))?;
    Ok(field.elem(rational(&pair[0], &format!("{path}[0]"))?, rational(&pair[1], &format!("{path}[1]"))?))
}

fn vector(field: QuadField, v: &Value, path: &str, rank: usize) -> Result<Vec<FieldElement>> {
    array(v, path, Some(rank))?
        .iter()
        .enumerate()
        .map(|(i, x)| element(field, x, &format!("{path}[{i}]")))
        .collect()
}

fn ideal(field: QuadField, v: &Value, path: &str) -> Result<FracIdeal> {
    let den = rational(v.get("den").ok_or_else(|| at(path, "missing \"den\""))?, &format!("{path}.den"))?;
    if !den.is_integer() || den <= Rat::from_integer(0.into()) {
        return Err(at(&format!("{path}.den"), "must be a positive integer"));
    }
    let hnf_path = format!("{path}.hnf");
    let rows = array(v.get("hnf").ok_or_else(|| at(path, "missing \"hnf\""))?, &hnf_path, Some(2))?;
    let mut entries = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let row = array(row, &format!("{hnf_path}[{i}]"), Some(2))?;
        for (j, x) in row.iter().enumerate() {
            entries.push(rational(x, &format!("{hnf_path}[{i}][{j}]"))?);
        }
    }
    let gens = [
        field.from_omega(&entries[0] / &den, &entries[1] / &den),
        field.from_omega(&entries[2] / &den, &entries[3] / &den),
    ];
    if gens.iter().all(FieldElement::is_zero) {
        return Err(at(&hnf_path, "the zero ideal is not allowed"));
    }
    FracIdeal::from_generators(field, &gens).map_err(|e| at(path, e))
}

/// Parses a lattice file.
pub fn parse_lattice(text: &str) -> Result<HermLattice> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| Error::input(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let d = doc
        .get("d")
        .and_then(Value::as_i64)
        .ok_or_else(|| at("d", "missing or not an integer"))?;
    let field = QuadField::new(d).map_err(|e| at("d", e))?;
    let rank = doc
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| at("rank", "missing or not a nonnegative integer"))? as usize;
    if rank == 0 {
        return Err(at("rank", "must be positive"));
    }
    let gram_v = doc.get("gram").ok_or_else(|| at("gram", "missing"))?;
    let gram = array(gram_v, "gram", Some(rank))?
        .iter()
        .enumerate()
        .map(|(i, row)| vector(field, row, &format!("gram[{i}]"), rank))
        .collect::<Result<Vec<_>>>()?;
    let space = Arc::new(HermSpace::new(field, gram).map_err(|e| at("gram", e))?);
    match doc.get("pseudo_basis") {
        None | Some(Value::Null) => Ok(HermLattice::free(space)),
        Some(pb) => {
            let entries = array(pb, "pseudo_basis", Some(rank))?;
            let mut out = Vec::with_capacity(rank);
            for (i, e) in entries.iter().enumerate() {
                let path = format!("pseudo_basis[{i}]");
                let a = ideal(field, e.get("ideal").ok_or_else(|| at(&path, "missing \"ideal\""))?, &format!("{path}.ideal"))?;
                let v = vector(
                    field,
                    e.get("vector").ok_or_else(|| at(&path, "missing \"vector\""))?,
                    &format!("{path}.vector"),
                    rank,
                )?;
                out.push((a, v));
            }
            HermLattice::from_pseudo_basis(space, &out).map_err(|e| at("pseudo_basis", e))
        }
    }
}

pub fn element_json(x: &FieldElement) -> Value {
    json!([fmt_rational(x.a()), fmt_rational(x.b())])
}

pub fn ideal_json(a: &FracIdeal) -> Value {
    let [[n, z], [r, s]] = a.hnf();
    json!({
        "den": a.den().to_string(),
        "hnf": [[n.to_string(), z.to_string()], [r.to_string(), s.to_string()]],
    })
}

/// Canonical JSON form of a lattice; [`parse_lattice`] inverts it.
pub fn lattice_json(l: &HermLattice) -> Value {
    let space = l.space();
    let gram: Vec<Value> = space.gram().iter().map(|row| Value::Array(row.iter().map(element_json).collect())).collect();
    let pb: Vec<Value> = l
        .pseudo_basis()
        .iter()
        .map(|(a, v)| json!({"ideal": ideal_json(a), "vector": v.iter().map(element_json).collect::<Vec<_>>()}))
        .collect();
    json!({"d": l.field().d(), "rank": l.rank(), "gram": gram, "pseudo_basis": pb})
}

pub fn serialize_lattice(l: &HermLattice) -> String {
    serde_json::to_string_pretty(&lattice_json(l)).expect("JSON values serialize")
}
