//! JSON reading and writing. Exact values travel as `"a/b"` strings; plain
//! JSON integers are accepted on input.

use std::path::Path;

use dstoch_core::exact::subset::SubsetPair;
use dstoch_core::{
    averaging, permutation_matrix, DSMatrix, Error, GeneratorSet, Partition, Permutation, Rational,
    Result, SimplexVector, Word,
};
use serde_json::{json, Map, Value};

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("{} is not valid JSON: {e}", path.display())))
}

fn bad(what: &str, v: &Value) -> Error {
    Error::Input(format!("expected {what}, found {v}"))
}

pub fn rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string().parse(),
        _ => Err(bad("a rational as \"a/b\" or an integer", v)),
    }
}

fn index_list(v: &Value) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| bad("a list of indices", v))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|i| i as usize)
                .ok_or_else(|| bad("a positive integer index", x))
        })
        .collect()
}

fn check_n(obj: &Map<String, Value>, actual: usize) -> Result<()> {
    match obj.get("n") {
        None => Ok(()),
        Some(v) if v.as_u64() == Some(actual as u64) => Ok(()),
        Some(v) => Err(Error::Input(format!("declared n = {v} but the data has dimension {actual}"))),
    }
}

/// `{"n", "rows"}`, `{"averaging": [[1,2],[3]]}`, `{"permutation": [2,1,3]}`
/// or a bare list of rows.
pub fn matrix(v: &Value) -> Result<DSMatrix> {
    let obj = match v {
        Value::Array(_) => return matrix_rows(v),
        Value::Object(o) => o,
        _ => return Err(bad("a matrix object", v)),
    };
    let m = if let Some(rows) = obj.get("rows") {
        matrix_rows(rows)?
    } else if let Some(blocks) = obj.get("averaging") {
        let blocks = blocks
            .as_array()
            .ok_or_else(|| bad("a list of blocks", blocks))?
            .iter()
            .map(index_list)
            .collect::<Result<Vec<_>>>()?;
        averaging(&Partition::from_one_based(&blocks)?)
    } else if let Some(map) = obj.get("permutation") {
        permutation_matrix(&Permutation::from_one_based(&index_list(map)?)?)
    } else {
        return Err(bad("a matrix with \"rows\", \"averaging\" or \"permutation\"", v));
    };
    check_n(obj, m.n())?;
    Ok(m)
}

fn matrix_rows(v: &Value) -> Result<DSMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad("a list of rows", v))?
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("a row", r))?
                .iter()
                .map(rational)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DSMatrix::from_rows(rows)
}

/// `{"n", "coords"}` or a bare list.
pub fn vector(v: &Value) -> Result<SimplexVector> {
    let (coords, obj) = match v {
        Value::Array(_) => (v, None),
        Value::Object(o) => (o.get("coords").ok_or_else(|| bad("a vector with \"coords\"", v))?, Some(o)),
        _ => return Err(bad("a vector", v)),
    };
    let coords = coords
        .as_array()
        .ok_or_else(|| bad("a list of coordinates", coords))?
        .iter()
        .map(rational)
        .collect::<Result<Vec<_>>>()?;
    let p = SimplexVector::new(coords)?;
    if let Some(o) = obj {
        check_n(o, p.n())?;
    }
    Ok(p)
}

/// Name → matrix object, optionally wrapped as `{"generators": {...}}`.
pub fn generators(v: &Value) -> Result<GeneratorSet> {
    let obj = v.as_object().ok_or_else(|| bad("an object of named matrices", v))?;
    let obj = match (obj.len(), obj.get("generators")) {
        (1, Some(Value::Object(inner))) => inner,
        _ => obj,
    };
    GeneratorSet::new(
        obj.iter()
            .map(|(name, m)| Ok((name.clone(), matrix(m)?)))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub fn rational_str(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn matrix_json(m: &DSMatrix) -> Value {
    let rows: Vec<Value> = m
        .rows()
        .iter()
        .map(|r| Value::Array(r.iter().map(rational_str).collect()))
        .collect();
    json!({"n": m.n(), "rows": rows})
}

pub fn vector_json(p: &SimplexVector) -> Value {
    json!({"n": p.n(), "coords": p.coords().iter().map(rational_str).collect::<Vec<_>>()})
}

pub fn generators_json(set: &GeneratorSet) -> Value {
    Value::Object(set.iter().map(|(k, m)| (k.to_string(), matrix_json(m))).collect())
}

pub fn pair_json(p: &SubsetPair) -> Value {
    json!({"X": p.x_one_based(), "Y": p.y_one_based()})
}

pub fn partition_json(p: &Partition) -> Value {
    json!(p.one_based())
}

pub fn word_json(w: &Word) -> Value {
    json!(w.0)
}

pub fn float_grid(rows: &[Vec<f64>]) -> Value {
    json!(rows)
}
