//! Gate-count tables over `N` and the stage budget `d`, from the cost model.

use std::io::{Read, Write};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use tcmm_core::{FmmAlgorithm, Regime};

use crate::circuits::{estimate_cost, predicted_exponent, BuildConfig, Kind};
use crate::error::{Result, ToolError};

pub const HEADER: [&str; 7] = ["kind", "d", "N", "gates", "depth", "wires", "predicted_exponent"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub kind: Kind,
    pub d: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub gates: u64,
    pub depth: u32,
    pub wires: u64,
    pub predicted_exponent: f64,
}

/// One row per `(d, N)`, `d` outermost. Trace rows use general mode with `tau = 0`.
pub fn scaling_rows(
    alg: &FmmAlgorithm,
    kind: Kind,
    bits: u32,
    budgets: &[u32],
    ns: &[usize],
) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::new();
    for &d in budgets {
        for &n in ns {
            let cfg = BuildConfig {
                kind,
                n,
                bits,
                regime: Regime::ConstantDepth(d),
                tau: (kind == Kind::Trace).then(BigInt::default),
                symmetric: false,
            };
            let plan = cfg.plan(alg)?;
            let cost = estimate_cost(alg, &plan)?;
            rows.push(ScalingRow {
                kind,
                d,
                n,
                gates: cost.gates,
                depth: cost.depth,
                wires: cost.wires,
                predicted_exponent: predicted_exponent(alg, plan.schedule())?,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[ScalingRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_error)?;
    }
    out.flush().map_err(|e| ToolError::Format(e.to_string()))?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ScalingRow>> {
    let mut input = csv::Reader::from_reader(r);
    let header = input.headers().map_err(csv_error)?;
    if header.iter().ne(HEADER) {
        return Err(ToolError::Format(format!(
            "unexpected scaling header {header:?}"
        )));
    }
    input
        .deserialize()
        .map(|row| row.map_err(csv_error))
        .collect()
}

fn csv_error(e: csv::Error) -> ToolError {
    ToolError::Format(e.to_string())
}

/// Least-squares slope of `log2(gates)` against `log2(N)`.
pub fn fit_slope(points: &[(usize, u64)]) -> f64 {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, g)| ((n as f64).log2(), (g as f64).log2()))
        .collect();
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xy.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `(N, gates)` of the rows with the given kind and budget.
pub fn series(rows: &[ScalingRow], kind: Kind, d: u32) -> Vec<(usize, u64)> {
    rows.iter()
        .filter(|r| r.kind == kind && r.d == d)
        .map(|r| (r.n, r.gates))
        .collect()
}
