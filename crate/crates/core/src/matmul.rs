//! Circuits computing the matrix product `C = AB`.
//!
//! Forward stages build the leaves of the A and B trees, one layer of pair
//! products forms the `r^l` scalar products, and backward stages collapse
//! the product tree level by level to its root. Depth is `4t + 1`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::arith::{signed_input, Operand};
use crate::circuit::{CircuitBuilder, ThresholdCircuit};
use crate::error::Result;
use crate::fabric::{CostModel, Fabric};
use crate::fmm::{FmmAlgorithm, Side};
use crate::labels::{bit_label, decode_matrix, encode_inputs};
use crate::matrix::{IntMatrix, Matrix};
use crate::pipeline::{
    check_plan, counted, forward_tree, record_schedule, record_stages, CostReport, StageCount,
};
use crate::schedule::{LevelSchedule, Regime};
use crate::stage::{collapse_backward_level, LevelMatrices};

#[derive(Debug, Clone, PartialEq)]
pub struct MatmulCircuitPlan {
    pub n: usize,
    /// Magnitude bits per input entry.
    pub bits: u32,
    pub schedule: LevelSchedule,
}

impl MatmulCircuitPlan {
    pub fn new(alg: &FmmAlgorithm, n: usize, bits: u32, regime: Regime) -> Result<Self> {
        let l = alg.levels_for(n)?;
        let params = alg.derive_params()?;
        Ok(MatmulCircuitPlan {
            n,
            bits,
            schedule: LevelSchedule::for_regime(&params, l, regime),
        })
    }
}

/// The staged product on any fabric; returns the root matrix and per-stage gate counts.
pub fn matmul_pipeline<F: Fabric>(
    fabric: &mut F,
    alg: &FmmAlgorithm,
    schedule: &LevelSchedule,
    a: Matrix<F::Value>,
    b: Matrix<F::Value>,
) -> Result<(Matrix<F::Value>, Vec<StageCount>)> {
    let mut stages = Vec::new();
    let la = forward_tree(fabric, alg, Side::A, "A", a, schedule, &mut stages)?;
    let lb = forward_tree(fabric, alg, Side::B, "B", b, schedule, &mut stages)?;
    let mut level = counted(fabric, &mut stages, "products".to_string(), |f| {
        let nodes = la
            .nodes
            .iter()
            .zip(&lb.nodes)
            .map(|(x, y)| Matrix::from_fn(1, |_, _| f.pair_product(&x[(0, 0)], &y[(0, 0)])))
            .collect();
        Ok(LevelMatrices {
            level: schedule.l,
            dim: 1,
            nodes,
        })
    })?;
    let targets = schedule.with_root();
    for &h in targets.iter().rev().skip(1) {
        level = counted(fabric, &mut stages, format!("backward-h{h}"), |f| {
            collapse_backward_level(f, alg, &level, h)
        })?;
    }
    let root = level.nodes.pop().expect("collapse ends at a single root");
    Ok((root, stages))
}

pub fn build_matmul_circuit(alg: &FmmAlgorithm, plan: &MatmulCircuitPlan) -> Result<ThresholdCircuit> {
    check_plan(alg, plan.n, plan.bits, &plan.schedule)?;
    let mut builder = CircuitBuilder::new();
    builder.zero();
    let mut input = |name: &str| {
        Matrix::from_fn(plan.n, |i, j| {
            Operand::Signed(signed_input(&mut builder, &format!("{name}[{i}][{j}]"), plan.bits))
        })
    };
    let a = input("A");
    let b = input("B");
    let (c, stages) = matmul_pipeline(&mut builder, alg, &plan.schedule, a, b)?;
    for i in 0..plan.n {
        for j in 0..plan.n {
            let v = c[(i, j)].as_signed().expect("sums are sign-magnitude");
            for (k, &s) in v.pos.iter().enumerate() {
                builder.add_output(s, bit_label("C", i, j, false, k as u32));
            }
            for (k, &s) in v.neg.iter().enumerate() {
                builder.add_output(s, bit_label("C", i, j, true, k as u32));
            }
        }
    }
    builder.set_metadata("kind", "matmul");
    builder.set_metadata("n", plan.n.to_string());
    builder.set_metadata("bits", plan.bits.to_string());
    record_schedule(&mut builder, alg, &plan.schedule);
    record_stages(&mut builder, &stages);
    Ok(builder.finish())
}

/// Exact size of [`build_matmul_circuit`]'s output without building it.
pub fn estimate_matmul_cost(alg: &FmmAlgorithm, plan: &MatmulCircuitPlan) -> Result<CostReport> {
    check_plan(alg, plan.n, plan.bits, &plan.schedule)?;
    let mut model = CostModel::new();
    let input = model.input(plan.bits);
    let a = Matrix::from_fn(plan.n, |_, _| input.clone());
    let (c, stages) = matmul_pipeline(&mut model, alg, &plan.schedule, a.clone(), a)?;
    let depth = c.rows().flatten().map(|v| v.layer).max().unwrap_or(0);
    Ok(CostReport::from_model(&model, depth, stages))
}

/// Input bits for `A`, `B`; entries must fit in the circuit's bit width.
pub fn encode_matmul_inputs(
    circuit: &ThresholdCircuit,
    a: &IntMatrix,
    b: &IntMatrix,
) -> Result<Vec<bool>> {
    encode_inputs(circuit.input_labels(), &BTreeMap::from([("A", a), ("B", b)]))
}

/// `C = pos - neg` per entry, from the output bits of a matmul circuit.
pub fn decode_outputs(circuit: &ThresholdCircuit, outputs: &[bool]) -> Result<IntMatrix> {
    decode_matrix(circuit.output_labels(), outputs, "C")
}
