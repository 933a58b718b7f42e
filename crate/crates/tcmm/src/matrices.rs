//! Matrix input files: `{"A": [[int]], "B": [[int]]}`, row-major.
//!
//! Entries are JSON integers or decimal strings for values beyond 64 bits.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::Value;
use tcmm_core::{IntMatrix, Matrix};

use crate::error::{Result, ToolError};

fn entry(v: &Value, name: &str) -> Result<BigInt> {
    let bad = || ToolError::Format(format!("matrix {name}: {v} is not an integer"));
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(bad),
        Value::String(s) => s.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn matrix(v: &Value, name: &str) -> Result<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| ToolError::Format(format!("matrix {name} must be an array of rows")))?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| ToolError::Format(format!("matrix {name}: rows must be arrays")))?
                .iter()
                .map(|x| entry(x, name))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
        .ok_or_else(|| ToolError::Format(format!("matrix {name} is not square")))
}

/// Every matrix in the document, by key.
pub fn parse_matrices(text: &str) -> Result<BTreeMap<String, IntMatrix>> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| ToolError::Format("matrix file must be a JSON object".into()))?;
    obj.iter()
        .map(|(k, v)| Ok((k.clone(), matrix(v, k)?)))
        .collect()
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.rows()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|x| match i64::try_from(x) {
                            Ok(v) => Value::from(v),
                            Err(_) => Value::from(x.to_string()),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}
