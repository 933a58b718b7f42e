//! Building circuits from command-line style settings.

use num_bigint::BigInt;
use serde::Serialize;
use tcmm_core::matmul::estimate_matmul_cost;
use tcmm_core::schedule::predict_gate_exponent;
use tcmm_core::trace::estimate_trace_cost;
use tcmm_core::{
    build_matmul_circuit, build_trace_circuit, stats, CostReport, FmmAlgorithm, LevelSchedule,
    MatmulCircuitPlan, Regime, ThresholdCircuit, TraceCircuitPlan,
};

use crate::error::{Result, ToolError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Matmul,
    Trace,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Matmul => "matmul",
            Kind::Trace => "trace",
        }
    }

    /// Depth of the circuit for a `t`-stage schedule.
    pub fn depth(self, t: u32) -> u32 {
        match self {
            Kind::Matmul => 4 * t + 1,
            Kind::Trace => 2 * t + 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    pub kind: Kind,
    pub n: usize,
    pub bits: u32,
    pub regime: Regime,
    /// Trace threshold; required for trace circuits, rejected for matmul.
    pub tau: Option<BigInt>,
    pub symmetric: bool,
}

pub enum Plan {
    Matmul(MatmulCircuitPlan),
    Trace(TraceCircuitPlan),
}

impl Plan {
    pub fn schedule(&self) -> &LevelSchedule {
        match self {
            Plan::Matmul(p) => &p.schedule,
            Plan::Trace(p) => &p.schedule,
        }
    }
}

impl BuildConfig {
    pub fn plan(&self, alg: &FmmAlgorithm) -> Result<Plan> {
        match self.kind {
            Kind::Matmul => {
                if self.tau.is_some() || self.symmetric {
                    return Err(ToolError::Usage(
                        "--tau and --symmetric apply to trace circuits only".into(),
                    ));
                }
                Ok(Plan::Matmul(MatmulCircuitPlan::new(alg, self.n, self.bits, self.regime)?))
            }
            Kind::Trace => {
                let tau = self
                    .tau
                    .clone()
                    .ok_or_else(|| ToolError::Usage("trace circuits need --tau".into()))?;
                Ok(Plan::Trace(TraceCircuitPlan::new(
                    alg,
                    self.n,
                    self.bits,
                    tau,
                    self.regime,
                    self.symmetric,
                )?))
            }
        }
    }
}

pub fn build_circuit(alg: &FmmAlgorithm, plan: &Plan) -> Result<ThresholdCircuit> {
    Ok(match plan {
        Plan::Matmul(p) => build_matmul_circuit(alg, p)?,
        Plan::Trace(p) => build_trace_circuit(alg, p)?,
    })
}

pub fn estimate_cost(alg: &FmmAlgorithm, plan: &Plan) -> Result<CostReport> {
    Ok(match plan {
        Plan::Matmul(p) => estimate_matmul_cost(alg, p)?,
        Plan::Trace(p) => estimate_trace_cost(alg, p)?,
    })
}

/// `omega + c gamma^d` for a depth budget `d`; other regimes use the stage count `t`.
pub fn predicted_exponent(alg: &FmmAlgorithm, schedule: &LevelSchedule) -> Result<f64> {
    let d = match schedule.regime {
        Regime::ConstantDepth(d) => d,
        _ => schedule.t(),
    };
    Ok(predict_gate_exponent(&alg.derive_params()?, d))
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildReport {
    pub kind: Kind,
    pub algorithm: String,
    pub n: usize,
    pub bits: u32,
    pub levels: Vec<u32>,
    pub t: u32,
    pub gates: u64,
    pub depth: u32,
    pub expected_depth: u32,
    pub wires: u64,
    pub max_fanin: u64,
    pub max_abs_weight: String,
    pub per_layer_gate_counts: Vec<u64>,
    pub predicted_exponent: f64,
}

pub fn build_report(
    alg: &FmmAlgorithm,
    cfg: &BuildConfig,
    plan: &Plan,
    circuit: &ThresholdCircuit,
) -> Result<BuildReport> {
    let st = stats(circuit);
    let schedule = plan.schedule();
    Ok(BuildReport {
        kind: cfg.kind,
        algorithm: alg.name.clone(),
        n: cfg.n,
        bits: cfg.bits,
        levels: schedule.levels.clone(),
        t: schedule.t(),
        gates: st.gates,
        depth: st.depth,
        expected_depth: cfg.kind.depth(schedule.t()),
        wires: st.wires,
        max_fanin: st.max_fanin,
        max_abs_weight: st.max_abs_weight.to_string(),
        per_layer_gate_counts: st.per_layer_gate_counts,
        predicted_exponent: predicted_exponent(alg, schedule)?,
    })
}
