#![no_std]
extern crate alloc;

pub mod arith;
pub mod circuit;
pub mod error;
pub mod fabric;
pub mod fmm;
pub mod labels;
pub mod matmul;
pub mod matrix;
pub mod oracle;
pub mod pipeline;
pub mod schedule;
pub mod stage;
pub mod trace;

pub use arith::{Operand, Representation, SignedValue, WeightedSumSpec};
pub use circuit::{
    evaluate, stats, CircuitBuilder, CircuitStats, Signal, SignalKind, Simulator,
    ThresholdCircuit,
};
pub use error::{Error, Result};
pub use fmm::{DerivedParams, FmmAlgorithm, Side};
pub use matrix::{IntMatrix, Matrix};
pub use fabric::{CostModel, CostTotals, Evaluator, Fabric, Profile};
pub use schedule::{LevelSchedule, Regime};
pub use stage::LevelMatrices;
pub use matmul::{build_matmul_circuit, decode_outputs, MatmulCircuitPlan};
pub use pipeline::{CostReport, StageCount};
pub use trace::{build_naive_triangle_circuit, build_trace_circuit, TraceCircuitPlan};
