//! Threshold-circuit intermediate representation.
//!
//! A circuit is a flat, topologically ordered list of linear threshold gates
//! over primary input bits. Gate `g` fires iff `sum_i w_i * y_i >= t` over its
//! fan-in. Weights and thresholds are arbitrary-precision integers; they are
//! stored as `i64` with an out-of-line `BigInt` fallback.
//!
//! Fan-in lists live in a pool and may be shared by several gates (all the
//! comparator gates of one sum read the same fan-in) or may extend an earlier
//! list (`base`). Both are storage details: every accessor reports the full,
//! per-gate fan-in.

mod sim;
mod stats;

pub use sim::{evaluate, Simulator};
pub use stats::{stats, CircuitStats};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

const GATE_BIT: u32 = 1 << 31;
const NO_BASE: u32 = u32::MAX;
const BIG: i64 = i64::MIN;

/// Reference to a primary input or a gate output.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signal(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    Input(u32),
    Gate(u32),
}

impl Signal {
    pub fn input(index: u32) -> Self {
        assert!(index < GATE_BIT, "input index overflow");
        Signal(index)
    }

    pub fn gate(index: u32) -> Self {
        assert!(index < GATE_BIT, "gate index overflow");
        Signal(index | GATE_BIT)
    }

    pub fn kind(self) -> SignalKind {
        if self.0 & GATE_BIT != 0 {
            SignalKind::Gate(self.0 & !GATE_BIT)
        } else {
            SignalKind::Input(self.0)
        }
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            SignalKind::Input(i) => write!(f, "in{i}"),
            SignalKind::Gate(g) => write!(f, "g{g}"),
        }
    }
}

/// Handle to a pooled fan-in list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaninId(u32);

#[derive(Debug, Clone, Default)]
struct IntStore {
    small: Vec<i64>,
    big: BTreeMap<u32, BigInt>,
}

impl IntStore {
    fn push(&mut self, v: &BigInt) {
        match v.to_i64() {
            Some(x) if x != BIG => self.small.push(x),
            _ => {
                self.big.insert(self.small.len() as u32, v.clone());
                self.small.push(BIG);
            }
        }
    }

    fn small(&self, i: usize) -> Option<i64> {
        let x = self.small[i];
        (x != BIG).then_some(x)
    }

    fn get(&self, i: usize) -> BigInt {
        match self.small(i) {
            Some(x) => BigInt::from(x),
            None => self.big[&(i as u32)].clone(),
        }
    }
}

#[derive(Debug, Clone)]
struct FaninPool {
    base: Vec<u32>,
    /// Offsets into `srcs`/`weights`; `len() == fanins + 1`.
    start: Vec<u32>,
    /// Full length including the base chain.
    total: Vec<u32>,
    srcs: Vec<Signal>,
    weights: IntStore,
}

impl Default for FaninPool {
    fn default() -> Self {
        FaninPool {
            base: Vec::new(),
            start: vec![0],
            total: Vec::new(),
            srcs: Vec::new(),
            weights: IntStore::default(),
        }
    }
}

impl FaninPool {
    fn len(&self) -> usize {
        self.base.len()
    }

    fn own_range(&self, f: usize) -> core::ops::Range<usize> {
        self.start[f] as usize..self.start[f + 1] as usize
    }

    fn base_of(&self, f: usize) -> Option<usize> {
        let b = self.base[f];
        (b != NO_BASE).then_some(b as usize)
    }

    /// Chain from the root list down to `f`.
    fn chain(&self, f: usize) -> Vec<usize> {
        let mut chain = vec![f];
        let mut cur = f;
        while let Some(b) = self.base_of(cur) {
            chain.push(b);
            cur = b;
        }
        chain.reverse();
        chain
    }

    fn expanded(&self, f: usize) -> Vec<(Signal, BigInt)> {
        let mut out = Vec::with_capacity(self.total[f] as usize);
        for link in self.chain(f) {
            for e in self.own_range(link) {
                out.push((self.srcs[e], self.weights.get(e)));
            }
        }
        out
    }
}

/// Layered DAG of threshold gates; immutable once built.
#[derive(Debug, Clone, Default)]
pub struct ThresholdCircuit {
    input_labels: Vec<String>,
    fanins: FaninPool,
    gate_fanin: Vec<u32>,
    thresholds: IntStore,
    outputs: Vec<Signal>,
    output_labels: Vec<String>,
    metadata: BTreeMap<String, String>,
}

impl ThresholdCircuit {
    pub fn num_inputs(&self) -> usize {
        self.input_labels.len()
    }

    pub fn num_gates(&self) -> usize {
        self.gate_fanin.len()
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn outputs(&self) -> &[Signal] {
        &self.outputs
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    /// Free-form string metadata carried through netlist files.
    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn threshold(&self, gate: usize) -> BigInt {
        self.thresholds.get(gate)
    }

    /// Full fan-in of `gate`, in stored order.
    pub fn fanin(&self, gate: usize) -> Vec<(Signal, BigInt)> {
        self.fanins.expanded(self.gate_fanin[gate] as usize)
    }

    pub fn fanin_len(&self, gate: usize) -> usize {
        self.fanins.total[self.gate_fanin[gate] as usize] as usize
    }

    pub(crate) fn fanin_id(&self, gate: usize) -> usize {
        self.gate_fanin[gate] as usize
    }

    /// Layer of every gate: inputs are layer 0, a gate is one above its deepest source.
    pub fn gate_layers(&self) -> Vec<u32> {
        let mut fanin_layer = vec![0u32; self.fanins.len()];
        let mut gate_layer = vec![0u32; self.num_gates()];
        let mut known = vec![false; self.fanins.len()];
        for g in 0..self.num_gates() {
            let f = self.fanin_id(g);
            if !known[f] {
                for link in self.fanins.chain(f) {
                    if known[link] {
                        continue;
                    }
                    let mut layer = self.fanins.base_of(link).map_or(0, |b| fanin_layer[b]);
                    for e in self.fanins.own_range(link) {
                        if let SignalKind::Gate(src) = self.fanins.srcs[e].kind() {
                            layer = layer.max(gate_layer[src as usize]);
                        }
                    }
                    fanin_layer[link] = layer;
                    known[link] = true;
                }
            }
            gate_layer[g] = fanin_layer[f] + 1;
        }
        gate_layer
    }

    pub fn signal_layer(layers: &[u32], s: Signal) -> u32 {
        match s.kind() {
            SignalKind::Input(_) => 0,
            SignalKind::Gate(g) => layers[g as usize],
        }
    }
}

/// Gate-for-gate equality: same inputs, gate thresholds and full fan-in
/// lists, outputs, labels and metadata. Fan-in pooling is ignored.
impl PartialEq for ThresholdCircuit {
    fn eq(&self, other: &Self) -> bool {
        self.input_labels == other.input_labels
            && self.outputs == other.outputs
            && self.output_labels == other.output_labels
            && self.metadata == other.metadata
            && self.num_gates() == other.num_gates()
            && (0..self.num_gates()).all(|g| {
                self.threshold(g) == other.threshold(g)
                    && self.fanin_len(g) == other.fanin_len(g)
                    && self.fanin(g) == other.fanin(g)
            })
    }
}

/// Incremental, append-only construction of a [`ThresholdCircuit`].
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    circuit: ThresholdCircuit,
    zero: Option<Signal>,
}

/// Label of the distinguished always-0 input.
pub const CONST_ZERO_LABEL: &str = "const0";

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_input(&mut self, label: impl Into<String>) -> Signal {
        let idx = self.circuit.input_labels.len() as u32;
        self.circuit.input_labels.push(label.into());
        Signal::input(idx)
    }

    /// The shared always-0 input, created on first use.
    pub fn zero(&mut self) -> Signal {
        match self.zero {
            Some(z) => z,
            None => {
                let z = self.add_input(CONST_ZERO_LABEL);
                self.zero = Some(z);
                z
            }
        }
    }

    pub fn is_zero(&self, s: Signal) -> bool {
        self.zero == Some(s)
    }

    pub fn num_gates(&self) -> usize {
        self.circuit.num_gates()
    }

    pub fn num_inputs(&self) -> usize {
        self.circuit.num_inputs()
    }

    /// Appends a gate. Terms are merged per source; zero weights and the
    /// constant-zero input are dropped.
    pub fn add_gate<I>(&mut self, terms: I, threshold: BigInt) -> Signal
    where
        I: IntoIterator<Item = (Signal, BigInt)>,
    {
        let terms = self.merge_terms(terms);
        let f = self.intern_fanin(terms);
        self.gate_on(f, threshold)
    }

    /// Appends a gate exactly as given, rejecting forward references,
    /// unknown inputs and repeated sources. Used when loading netlists.
    pub fn add_gate_checked(
        &mut self,
        terms: Vec<(Signal, BigInt)>,
        threshold: BigInt,
    ) -> Result<Signal> {
        let me = self.num_gates();
        let mut seen: Vec<Signal> = terms.iter().map(|t| t.0).collect();
        for &s in &seen {
            match s.kind() {
                SignalKind::Gate(g) if g as usize >= me => {
                    return Err(Error::InvalidStructure(format!(
                        "gate {me} references gate {g} (forward reference)"
                    )));
                }
                SignalKind::Input(i) if i as usize >= self.num_inputs() => {
                    return Err(Error::InvalidStructure(format!(
                        "gate {me} references unknown input {i}"
                    )));
                }
                _ => {}
            }
        }
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidStructure(format!(
                "gate {me} lists a fan-in source twice"
            )));
        }
        let f = self.intern_fanin(terms);
        Ok(self.gate_on(f, threshold))
    }

    fn merge_terms<I>(&self, terms: I) -> Vec<(Signal, BigInt)>
    where
        I: IntoIterator<Item = (Signal, BigInt)>,
    {
        let mut merged: Vec<(Signal, BigInt)> = Vec::new();
        let mut index: BTreeMap<Signal, usize> = BTreeMap::new();
        for (s, w) in terms {
            if self.is_zero(s) || w.is_zero() {
                continue;
            }
            match index.get(&s) {
                Some(&i) => merged[i].1 += w,
                None => {
                    index.insert(s, merged.len());
                    merged.push((s, w));
                }
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        merged
    }

    /// Reuses the most recent fan-in list when it is identical.
    fn intern_fanin(&mut self, terms: Vec<(Signal, BigInt)>) -> FaninId {
        let pool = &self.circuit.fanins;
        if let Some(last) = pool.len().checked_sub(1) {
            if pool.base_of(last).is_none() && pool.total[last] as usize == terms.len() {
                let range = pool.own_range(last);
                let same = range
                    .zip(&terms)
                    .all(|(e, (s, w))| pool.srcs[e] == *s && pool.weights.get(e) == *w);
                if same {
                    return FaninId(last as u32);
                }
            }
        }
        self.new_fanin(None, terms)
    }

    /// Pools a new fan-in list extending `base`. Callers guarantee that the
    /// terms are merged, nonzero, and disjoint from the base chain.
    pub(crate) fn new_fanin(&mut self, base: Option<FaninId>, terms: Vec<(Signal, BigInt)>) -> FaninId {
        let pool = &mut self.circuit.fanins;
        let id = pool.len() as u32;
        let base_total = base.map_or(0, |b| pool.total[b.0 as usize]);
        pool.base.push(base.map_or(NO_BASE, |b| b.0));
        pool.total.push(base_total + terms.len() as u32);
        for (s, w) in &terms {
            pool.srcs.push(*s);
            pool.weights.push(w);
        }
        pool.start.push(pool.srcs.len() as u32);
        FaninId(id)
    }

    pub(crate) fn gate_on(&mut self, fanin: FaninId, threshold: BigInt) -> Signal {
        let idx = self.circuit.gate_fanin.len() as u32;
        self.circuit.gate_fanin.push(fanin.0);
        self.circuit.thresholds.push(&threshold);
        Signal::gate(idx)
    }

    pub fn add_output(&mut self, signal: Signal, label: impl Into<String>) {
        self.circuit.outputs.push(signal);
        self.circuit.output_labels.push(label.into());
    }

    pub fn set_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.circuit.metadata.insert(key.into(), value.into());
    }

    pub fn finish(self) -> ThresholdCircuit {
        self.circuit
    }
}
