//! Matrix JSON: row-major arrays, complex entries as [re, im].

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, RMat};

pub fn real_matrix(m: &RMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| json!((0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())).collect())
}

pub fn complex_matrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| json!((0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>()))
            .collect(),
    )
}

fn rows(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Json("matrix must be an array of rows".into()))
}

pub fn parse_real_matrix(v: &Value) -> Result<RMat> {
    let rs = rows(v)?;
    let data: Vec<Vec<f64>> = rs
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Json("row must be an array".into()))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::Json("entry must be a number".into())))
                .collect()
        })
        .collect::<Result<_>>()?;
    let ncols = data.first().map(|r| r.len()).unwrap_or(0);
    if data.iter().any(|r| r.len() != ncols) {
        return Err(Error::Json("ragged matrix".into()));
    }
    Ok(RMat::from_fn(data.len(), ncols, |i, j| data[i][j]))
}

pub fn parse_complex_matrix(v: &Value) -> Result<CMat> {
    let rs = rows(v)?;
    let entry = |x: &Value| -> Result<(f64, f64)> {
        match x.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => Ok((
                re.as_f64().ok_or_else(|| Error::Json("re must be a number".into()))?,
                im.as_f64().ok_or_else(|| Error::Json("im must be a number".into()))?,
            )),
            _ => Err(Error::Json("complex entry must be [re, im]".into())),
        }
    };
    let data: Vec<Vec<(f64, f64)>> = rs
        .iter()
        .map(|r| r.as_array().ok_or_else(|| Error::Json("row must be an array".into()))?.iter().map(entry).collect())
        .collect::<Result<_>>()?;
    let ncols = data.first().map(|r| r.len()).unwrap_or(0);
    if data.iter().any(|r| r.len() != ncols) {
        return Err(Error::Json("ragged matrix".into()));
    }
    Ok(CMat::from_fn(data.len(), ncols, |i, j| c(data[i][j].0, data[i][j].1)))
}
