//! Algorithm files: `{"T", "r", "a_coeffs", "b_coeffs", "c_coeffs"}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tcmm_core::FmmAlgorithm;

use crate::error::{Result, ToolError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgorithmDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(rename = "T")]
    t: usize,
    r: usize,
    a_coeffs: Vec<Vec<i64>>,
    b_coeffs: Vec<Vec<i64>>,
    c_coeffs: Vec<Vec<i64>>,
}

/// Parses an algorithm document and checks array shapes against `T` and `r`.
/// The bilinear identity is not checked here.
pub fn load_algorithm(text: &str, default_name: &str) -> Result<FmmAlgorithm> {
    let doc: AlgorithmDoc = serde_json::from_str(text)?;
    let alg = FmmAlgorithm {
        name: doc.name.unwrap_or_else(|| default_name.to_string()),
        block_dim: doc.t,
        rank: doc.r,
        a_coeffs: doc.a_coeffs,
        b_coeffs: doc.b_coeffs,
        c_coeffs: doc.c_coeffs,
    };
    alg.check_shape()?;
    Ok(alg)
}

pub fn algorithm_to_json(alg: &FmmAlgorithm) -> String {
    let doc = AlgorithmDoc {
        name: Some(alg.name.clone()),
        t: alg.block_dim,
        r: alg.rank,
        a_coeffs: alg.a_coeffs.clone(),
        b_coeffs: alg.b_coeffs.clone(),
        c_coeffs: alg.c_coeffs.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

/// `strassen` or a path to an algorithm file.
pub fn resolve_algorithm(spec: &str) -> Result<FmmAlgorithm> {
    if spec == "strassen" {
        return Ok(FmmAlgorithm::strassen());
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    load_algorithm(&text, stem)
}
