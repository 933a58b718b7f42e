use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::ThresholdCircuit;

/// Size and depth measures. Primary inputs are not counted as gates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CircuitStats {
    pub gates: u64,
    /// Deepest output layer (inputs are layer 0).
    pub depth: u32,
    /// Total fan-in edges.
    pub wires: u64,
    pub max_fanin: u64,
    pub max_abs_weight: BigInt,
    /// Gate count of layers `1..=L`; entry 0 is layer 1.
    pub per_layer_gate_counts: Vec<u64>,
}

pub fn stats(circuit: &ThresholdCircuit) -> CircuitStats {
    let layers = circuit.gate_layers();
    let top = layers.iter().copied().max().unwrap_or(0);
    let mut per_layer = vec![0u64; top as usize];
    for &l in &layers {
        per_layer[l as usize - 1] += 1;
    }
    let depth = circuit
        .outputs()
        .iter()
        .map(|&s| ThresholdCircuit::signal_layer(&layers, s))
        .max()
        .unwrap_or(0);
    let mut wires = 0u64;
    let mut max_fanin = 0u64;
    for g in 0..circuit.num_gates() {
        let n = circuit.fanin_len(g) as u64;
        wires += n;
        max_fanin = max_fanin.max(n);
    }
    let pool = &circuit.fanins;
    let mut max_abs_weight = BigInt::zero();
    for (e, &w) in pool.weights.small.iter().enumerate() {
        let w = if w == super::BIG {
            pool.weights.get(e).abs()
        } else {
            BigInt::from(w.unsigned_abs())
        };
        if w > max_abs_weight {
            max_abs_weight = w;
        }
    }
    CircuitStats {
        gates: circuit.num_gates() as u64,
        depth,
        wires,
        max_fanin,
        max_abs_weight,
        per_layer_gate_counts: per_layer,
    }
}

impl fmt::Display for CircuitStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gates:          {}", self.gates)?;
        writeln!(f, "depth:          {}", self.depth)?;
        writeln!(f, "wires:          {}", self.wires)?;
        writeln!(f, "max fan-in:     {}", self.max_fanin)?;
        writeln!(f, "max |weight|:   {}", self.max_abs_weight)?;
        write!(f, "gates by layer: {:?}", self.per_layer_gate_counts)
    }
}
