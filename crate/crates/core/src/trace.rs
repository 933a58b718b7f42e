//! Circuits deciding `trace(A^3) >= tau`, and the naive triangle circuit.
//!
//! `trace(A^3) = sum_ij A_ji C_ij` with `C = A A`. Writing each `C_ij` as a
//! combination of the leaf products `p_k` regroups the sum as
//! `sum_k p_k u_k`, where `u_k` is the leaf `k` of a third tree built with the
//! C-side coefficients over `D = A^T`. In symmetric mode `D` keeps only the
//! entries above the diagonal and the output gate doubles every weight, since
//! `sum_{i<j} A_ij C_ij = trace(A^3) / 2`. Depth is `2t + 2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{bits_u64, signed_input, Operand};
use crate::circuit::{CircuitBuilder, SignalKind, ThresholdCircuit};
use crate::error::{Error, Result};
use crate::fabric::{CostModel, Fabric};
use crate::fmm::{FmmAlgorithm, Side};
use crate::labels::{edge_label, encode_inputs, DECISION_LABEL};
use crate::matrix::{IntMatrix, Matrix};
use crate::oracle::check_adjacency;
use crate::pipeline::{
    check_plan, counted, forward_tree, record_schedule, record_stages, CostReport, StageCount,
};
use crate::schedule::{LevelSchedule, Regime};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceCircuitPlan {
    pub n: usize,
    pub bits: u32,
    pub tau: BigInt,
    pub schedule: LevelSchedule,
    /// Symmetric `A` with zero diagonal; only entries above the diagonal are inputs.
    pub symmetric: bool,
}

impl TraceCircuitPlan {
    pub fn new(
        alg: &FmmAlgorithm,
        n: usize,
        bits: u32,
        tau: BigInt,
        regime: Regime,
        symmetric: bool,
    ) -> Result<Self> {
        let l = alg.levels_for(n)?;
        let params = alg.derive_params()?;
        Ok(TraceCircuitPlan {
            n,
            bits,
            tau,
            schedule: LevelSchedule::for_regime(&params, l, regime),
            symmetric,
        })
    }

    fn check(&self, alg: &FmmAlgorithm) -> Result<()> {
        check_plan(alg, self.n, self.bits, &self.schedule)?;
        let max_bits = max_tau_bits(self.n, self.bits, self.schedule.l);
        let bits = self.tau.magnitude().bits();
        if bits > max_bits {
            return Err(Error::ThresholdTooWide { bits, max_bits });
        }
        Ok(())
    }
}

/// Width bound for `tau`: `|trace(A^3)| <= N^3 (2^b - 1)^3`, plus `l + 2` bits of slack.
pub fn max_tau_bits(n: usize, bits: u32, l: u32) -> u64 {
    let n3 = (n as u64).saturating_pow(3);
    3 * u64::from(bits) + u64::from(bits_u64(n3)) + u64::from(l) + 2
}

/// The staged decision on any fabric.
pub fn trace_pipeline<F: Fabric>(
    fabric: &mut F,
    alg: &FmmAlgorithm,
    schedule: &LevelSchedule,
    a: Matrix<F::Value>,
    d: Matrix<F::Value>,
    factor: i64,
    tau: &BigInt,
) -> Result<(F::Value, Vec<StageCount>)> {
    let mut stages = Vec::new();
    let la = forward_tree(fabric, alg, Side::A, "A", a.clone(), schedule, &mut stages)?;
    let lb = forward_tree(fabric, alg, Side::B, "B", a, schedule, &mut stages)?;
    let ld = forward_tree(fabric, alg, Side::Dual, "D", d, schedule, &mut stages)?;
    let products = counted(fabric, &mut stages, "products".to_string(), |f| {
        Ok(la
            .nodes
            .iter()
            .zip(&lb.nodes)
            .zip(&ld.nodes)
            .map(|((x, y), z)| f.triple_product(&x[(0, 0)], &y[(0, 0)], &z[(0, 0)]))
            .collect::<Vec<_>>())
    })?;
    let out = counted(fabric, &mut stages, "output".to_string(), |f| {
        let terms: Vec<_> = products.iter().map(|p| (factor, p)).collect();
        Ok(f.compare(&terms, tau))
    })?;
    Ok((out, stages))
}

/// Input matrices `(A, D)` of the pipeline, with the zero value where no input exists.
fn trace_operands<V: Clone>(
    n: usize,
    symmetric: bool,
    zero: V,
    mut input: impl FnMut(usize, usize) -> V,
) -> (Matrix<V>, Matrix<V>) {
    let mut vars: BTreeMap<(usize, usize), V> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if !symmetric || i < j {
                vars.insert((i, j), input(i, j));
            }
        }
    }
    let a = Matrix::from_fn(n, |i, j| {
        let key = if symmetric && i > j { (j, i) } else { (i, j) };
        vars.get(&key).cloned().unwrap_or_else(|| zero.clone())
    });
    let d = if symmetric {
        Matrix::from_fn(n, |i, j| {
            if i < j {
                vars[&(i, j)].clone()
            } else {
                zero.clone()
            }
        })
    } else {
        a.transpose()
    };
    (a, d)
}

fn factor(symmetric: bool) -> i64 {
    if symmetric {
        2
    } else {
        1
    }
}

pub fn build_trace_circuit(alg: &FmmAlgorithm, plan: &TraceCircuitPlan) -> Result<ThresholdCircuit> {
    plan.check(alg)?;
    let mut builder = CircuitBuilder::new();
    builder.zero();
    let zero = builder.zero_value();
    let (a, d) = trace_operands(plan.n, plan.symmetric, zero, |i, j| {
        Operand::Signed(signed_input(&mut builder, &format!("A[{i}][{j}]"), plan.bits))
    });
    let (out, stages) = trace_pipeline(
        &mut builder,
        alg,
        &plan.schedule,
        a,
        d,
        factor(plan.symmetric),
        &plan.tau,
    )?;
    let g = out.as_signed().expect("decision is a single bit").pos[0];
    builder.add_output(g, DECISION_LABEL);
    builder.set_metadata("kind", "trace");
    builder.set_metadata("n", plan.n.to_string());
    builder.set_metadata("bits", plan.bits.to_string());
    builder.set_metadata("tau", plan.tau.to_string());
    builder.set_metadata("symmetric", plan.symmetric.to_string());
    record_schedule(&mut builder, alg, &plan.schedule);
    record_stages(&mut builder, &stages);
    Ok(builder.finish())
}

/// Size of [`build_trace_circuit`]'s output without building it. Exact in
/// general mode; in symmetric mode the mirrored inputs are counted as
/// distinct wires, so the figures are an estimate.
pub fn estimate_trace_cost(alg: &FmmAlgorithm, plan: &TraceCircuitPlan) -> Result<CostReport> {
    plan.check(alg)?;
    let mut model = CostModel::new();
    let zero = model.zero_value();
    let input = model.input(plan.bits);
    let (a, d) = trace_operands(plan.n, plan.symmetric, zero, |_, _| input.clone());
    let (out, stages) = trace_pipeline(
        &mut model,
        alg,
        &plan.schedule,
        a,
        d,
        factor(plan.symmetric),
        &plan.tau,
    )?;
    Ok(CostReport::from_model(&model, out.layer, stages))
}

/// Input bits for `A`. In symmetric mode `A` must be symmetric with zero diagonal.
pub fn encode_trace_inputs(circuit: &ThresholdCircuit, a: &IntMatrix, symmetric: bool) -> Result<Vec<bool>> {
    if symmetric {
        let n = a.dim();
        let ok = (0..n).all(|i| (0..n).all(|j| a[(i, j)] == a[(j, i)]))
            && (0..n).all(|i| a[(i, i)] == BigInt::default());
        if !ok {
            return Err(Error::NotAdjacency);
        }
    }
    encode_inputs(circuit.input_labels(), &BTreeMap::from([("A", a)]))
}

/// Gate index of the decision gate, for threshold sweeps with a simulator.
pub fn decision_gate(circuit: &ThresholdCircuit) -> Option<usize> {
    match circuit.outputs().first()?.kind() {
        SignalKind::Gate(g) => Some(g as usize),
        SignalKind::Input(_) => None,
    }
}

/// Depth-2 circuit `[#triangles >= tau]` with one gate per vertex triple.
pub fn build_naive_triangle_circuit(n: usize, tau: &BigInt) -> Result<ThresholdCircuit> {
    if n < 3 {
        return Err(Error::ShapeMismatch(format!("need at least 3 vertices, got {n}")));
    }
    let mut builder = CircuitBuilder::new();
    let mut x = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            x.insert((i, j), builder.add_input(edge_label(i, j)));
        }
    }
    let one = BigInt::one();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let terms = [x[&(i, j)], x[&(i, k)], x[&(j, k)]].map(|s| (s, one.clone()));
                triples.push(builder.add_gate(terms, BigInt::from(3)));
            }
        }
    }
    let out = builder.add_gate(triples.into_iter().map(|g| (g, one.clone())), tau.clone());
    builder.add_output(out, DECISION_LABEL);
    builder.set_metadata("kind", "naive-triangle");
    builder.set_metadata("n", n.to_string());
    builder.set_metadata("tau", tau.to_string());
    Ok(builder.finish())
}

/// Edge bits of an adjacency matrix for [`build_naive_triangle_circuit`].
pub fn encode_graph(circuit: &ThresholdCircuit, adjacency: &IntMatrix) -> Result<Vec<bool>> {
    check_adjacency(adjacency)?;
    encode_inputs(circuit.input_labels(), &BTreeMap::from([("x", adjacency)]))
}
