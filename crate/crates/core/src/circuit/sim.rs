//! Bit-exact simulator.
//!
//! Fan-in sums are computed once per evaluation and shared by every gate
//! reading the same pooled list. Lists whose weights all fit in `i64` are
//! accumulated in `i128`, which cannot overflow for fewer than `2^63` terms;
//! anything else goes through `BigInt`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{SignalKind, ThresholdCircuit, BIG};
use crate::error::{Error, Result};
use crate::Signal;

pub struct Simulator<'c> {
    circuit: &'c ThresholdCircuit,
    /// Per fan-in: every weight along the chain is a small `i64`.
    fast: Vec<bool>,
    /// Per gate: threshold clamped to `i128` (exact for comparisons with fast sums).
    thresholds: Vec<i128>,
    overrides: BTreeMap<usize, BigInt>,
    inputs: Vec<bool>,
    gates: Vec<bool>,
    stamp: Vec<u32>,
    sums: Vec<i128>,
    big_sums: BTreeMap<usize, BigInt>,
    epoch: u32,
}

fn clamp_i128(v: &BigInt) -> i128 {
    v.to_i128().unwrap_or(if v.sign() == num_bigint::Sign::Minus {
        i128::MIN
    } else {
        i128::MAX
    })
}

impl<'c> Simulator<'c> {
    pub fn new(circuit: &'c ThresholdCircuit) -> Self {
        let pool = &circuit.fanins;
        let mut fast = vec![true; pool.len()];
        for f in 0..pool.len() {
            let own_small = pool.own_range(f).all(|e| pool.weights.small[e] != BIG);
            fast[f] = own_small && pool.base_of(f).is_none_or(|b| fast[b]);
        }
        let thresholds = (0..circuit.num_gates())
            .map(|g| match circuit.thresholds.small(g) {
                Some(x) => i128::from(x),
                None => clamp_i128(&circuit.threshold(g)),
            })
            .collect();
        Simulator {
            circuit,
            fast,
            thresholds,
            overrides: BTreeMap::new(),
            inputs: Vec::new(),
            gates: vec![false; circuit.num_gates()],
            stamp: vec![0; pool.len()],
            sums: vec![0; pool.len()],
            big_sums: BTreeMap::new(),
            epoch: 0,
        }
    }

    /// Evaluates as if `gate` had threshold `threshold`; the circuit itself is untouched.
    pub fn override_threshold(&mut self, gate: usize, threshold: BigInt) {
        self.thresholds[gate] = clamp_i128(&threshold);
        self.overrides.insert(gate, threshold);
    }

    fn value(&self, s: Signal) -> bool {
        match s.kind() {
            SignalKind::Input(i) => self.inputs[i as usize],
            SignalKind::Gate(g) => self.gates[g as usize],
        }
    }

    fn fast_sum(&mut self, f: usize) -> i128 {
        if self.stamp[f] == self.epoch {
            return self.sums[f];
        }
        let pool = &self.circuit.fanins;
        let mut acc = match pool.base_of(f) {
            Some(b) => self.fast_sum(b),
            None => 0,
        };
        let pool = &self.circuit.fanins;
        for e in pool.own_range(f) {
            if self.value(pool.srcs[e]) {
                acc += i128::from(pool.weights.small[e]);
            }
        }
        self.stamp[f] = self.epoch;
        self.sums[f] = acc;
        acc
    }

    fn big_sum(&mut self, f: usize) -> BigInt {
        if self.stamp[f] == self.epoch {
            if let Some(v) = self.big_sums.get(&f) {
                return v.clone();
            }
        }
        let pool = &self.circuit.fanins;
        let mut acc = match pool.base_of(f) {
            Some(b) if self.fast[b] => BigInt::from(self.fast_sum(b)),
            Some(b) => self.big_sum(b),
            None => BigInt::zero(),
        };
        let pool = &self.circuit.fanins;
        for e in pool.own_range(f) {
            if self.value(pool.srcs[e]) {
                acc += pool.weights.get(e);
            }
        }
        self.stamp[f] = self.epoch;
        self.big_sums.insert(f, acc.clone());
        acc
    }

    /// Runs the circuit on `inputs`; results are read with [`Self::outputs`] / [`Self::gate`].
    pub fn run(&mut self, inputs: &[bool]) -> Result<()> {
        let n = self.circuit.num_inputs();
        if inputs.len() != n {
            return Err(Error::InputLength {
                expected: n,
                got: inputs.len(),
            });
        }
        self.inputs.clear();
        self.inputs.extend_from_slice(inputs);
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = u32::MAX);
            self.epoch = 1;
        }
        self.big_sums.clear();
        for g in 0..self.circuit.num_gates() {
            let f = self.circuit.fanin_id(g);
            let fires = if self.fast[f] {
                self.fast_sum(f) >= self.thresholds[g]
            } else {
                let sum = self.big_sum(f);
                match self.overrides.get(&g) {
                    Some(t) => sum >= *t,
                    None => sum >= self.circuit.threshold(g),
                }
            };
            self.gates[g] = fires;
        }
        Ok(())
    }

    pub fn gate(&self, g: usize) -> bool {
        self.gates[g]
    }

    pub fn outputs(&self) -> Vec<bool> {
        self.circuit.outputs.iter().map(|&s| self.value(s)).collect()
    }
}

/// One-shot evaluation: output bits of `circuit` on `inputs`.
pub fn evaluate(circuit: &ThresholdCircuit, inputs: &[bool]) -> Result<Vec<bool>> {
    let mut sim = Simulator::new(circuit);
    sim.run(inputs)?;
    Ok(sim.outputs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CircuitBuilder;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn triangle_gate() {
        let mut b = CircuitBuilder::new();
        let xs: Vec<_> = (0..3).map(|i| b.add_input(alloc::format!("x{i}"))).collect();
        let g = b.add_gate(xs.iter().map(|&x| (x, int(1))), int(3));
        b.add_output(g, "t");
        let c = b.finish();
        assert_eq!(evaluate(&c, &[true, true, true]).unwrap(), vec![true]);
        assert_eq!(evaluate(&c, &[true, true, false]).unwrap(), vec![false]);
        assert!(matches!(
            evaluate(&c, &[true]),
            Err(Error::InputLength { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn identity_circuit() {
        let mut b = CircuitBuilder::new();
        for i in 0..4 {
            let s = b.add_input(alloc::format!("x{i}"));
            b.add_output(s, alloc::format!("y{i}"));
        }
        let c = b.finish();
        let bits = [true, false, false, true];
        assert_eq!(evaluate(&c, &bits).unwrap(), bits.to_vec());
    }

    #[test]
    fn huge_weights_are_exact() {
        // 2^200 x - (2^200 - 1) y >= 1 is just x
        let big = BigInt::from(1u8) << 200u32;
        let mut b = CircuitBuilder::new();
        let x = b.add_input("x");
        let y = b.add_input("y");
        let g = b.add_gate([(x, big.clone()), (y, -(big.clone() - 1u8))], int(1));
        let h = b.add_gate([(g, int(1)), (y, int(1))], int(2));
        b.add_output(g, "g");
        b.add_output(h, "h");
        let c = b.finish();
        assert_eq!(evaluate(&c, &[true, true]).unwrap(), vec![true, true]);
        assert_eq!(evaluate(&c, &[false, true]).unwrap(), vec![false, false]);
        assert_eq!(evaluate(&c, &[true, false]).unwrap(), vec![true, false]);
    }

    #[test]
    fn threshold_override() {
        let mut b = CircuitBuilder::new();
        let x = b.add_input("x");
        let g = b.add_gate([(x, int(5))], int(5));
        b.add_output(g, "g");
        let c = b.finish();
        let mut sim = Simulator::new(&c);
        sim.run(&[true]).unwrap();
        assert!(sim.outputs()[0]);
        sim.override_threshold(0, int(6));
        sim.run(&[true]).unwrap();
        assert!(!sim.outputs()[0]);
        sim.override_threshold(0, BigInt::from(1u8) << 130u32);
        sim.run(&[true]).unwrap();
        assert!(!sim.outputs()[0]);
        sim.override_threshold(0, -(BigInt::from(1u8) << 130u32));
        sim.run(&[false]).unwrap();
        assert!(sim.outputs()[0]);
    }
}
