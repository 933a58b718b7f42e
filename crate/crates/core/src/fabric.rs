//! Back ends for the staged pipelines.
//!
//! Stage code is written once against [`Fabric`]. [`CircuitBuilder`] emits
//! gates; [`CostModel`] only tracks, per value, which bit positions are live
//! and how large the atoms are, which determines every gate count exactly
//! while using memory proportional to the number of values.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};

use crate::arith::{
    build_pair_product, build_triple_product, weighted_sum_terms, ExpGroup, Operand, PartPlan,
    SignedValue,
};
use crate::circuit::CircuitBuilder;

pub trait Fabric {
    type Value: Clone;

    /// The constant 0.
    fn zero_value(&mut self) -> Self::Value;
    /// Two-layer weighted sum (zero value when no term is live).
    fn weighted_sum(&mut self, terms: &[(i64, &Self::Value)]) -> Self::Value;
    /// One-layer product of two sign-magnitude values.
    fn pair_product(&mut self, x: &Self::Value, y: &Self::Value) -> Self::Value;
    /// One-layer product of three sign-magnitude values.
    fn triple_product(&mut self, x: &Self::Value, y: &Self::Value, z: &Self::Value)
        -> Self::Value;
    /// A single gate `[sum c * value >= threshold]`.
    fn compare(&mut self, terms: &[(i64, &Self::Value)], threshold: &BigInt) -> Self::Value;
    /// Gates emitted so far.
    fn gates(&self) -> u64;
}

fn signed(v: &Operand) -> &SignedValue {
    v.as_signed()
        .expect("products take sign-magnitude operands")
}

impl Fabric for CircuitBuilder {
    type Value = Operand;

    fn zero_value(&mut self) -> Operand {
        Operand::Signed(SignedValue::zero())
    }

    fn weighted_sum(&mut self, terms: &[(i64, &Operand)]) -> Operand {
        Operand::Signed(weighted_sum_terms(self, terms.iter().copied()))
    }

    fn pair_product(&mut self, x: &Operand, y: &Operand) -> Operand {
        Operand::Repr(build_pair_product(self, signed(x), signed(y)))
    }

    fn triple_product(&mut self, x: &Operand, y: &Operand, z: &Operand) -> Operand {
        Operand::Repr(build_triple_product(self, signed(x), signed(y), signed(z)))
    }

    fn compare(&mut self, terms: &[(i64, &Operand)], threshold: &BigInt) -> Operand {
        let mut fanin = Vec::new();
        for (c, op) in terms {
            let c = BigInt::from(*c);
            match op {
                Operand::Signed(v) => {
                    for (i, &s) in v.pos.iter().enumerate() {
                        fanin.push((s, &c << i));
                    }
                    for (i, &s) in v.neg.iter().enumerate() {
                        fanin.push((s, -(&c << i)));
                    }
                }
                Operand::Repr(r) => fanin.extend(r.terms.iter().map(|(w, s)| (*s, &c * w))),
            }
        }
        let g = self.add_gate(fanin, threshold.clone());
        let zero = self.zero();
        Operand::Signed(SignedValue::new(vec![g], vec![], zero))
    }

    fn gates(&self) -> u64 {
        self.num_gates() as u64
    }
}

/// Atoms of one part sharing a weight exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Group {
    pub exp: u32,
    pub count: u64,
    /// Sum of odd weight factors.
    pub mass: u128,
}

/// What the cost model knows about a value: its layer and atom groups per sign.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Profile {
    pub layer: u32,
    pub pos: Vec<Group>,
    pub neg: Vec<Group>,
}

impl Profile {
    /// A fresh `width`-bit sign-magnitude input.
    pub fn signed_input(width: u32) -> Self {
        let part: Vec<Group> = (0..width)
            .map(|exp| Group {
                exp,
                count: 1,
                mass: 1,
            })
            .collect();
        Profile {
            layer: 0,
            pos: part.clone(),
            neg: part,
        }
    }

    fn is_zero(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    fn atoms(&self) -> u64 {
        self.pos.iter().chain(&self.neg).map(|g| g.count).sum()
    }
}

/// Aggregate cost of everything passed through a [`CostModel`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CostTotals {
    pub gates: u64,
    pub wires: u64,
    pub max_fanin: u64,
    /// Entry 0 is layer 1.
    pub per_layer_gate_counts: Vec<u64>,
}

/// Counting back end: no gates are built.
#[derive(Debug, Default)]
pub struct CostModel {
    totals: CostTotals,
    interned: BTreeMap<Profile, Rc<Profile>>,
}

impl CostModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn totals(&self) -> &CostTotals {
        &self.totals
    }

    pub fn input(&mut self, width: u32) -> Rc<Profile> {
        self.intern(Profile::signed_input(width))
    }

    pub fn layer(v: &Profile) -> u32 {
        v.layer
    }

    fn intern(&mut self, p: Profile) -> Rc<Profile> {
        if let Some(rc) = self.interned.get(&p) {
            return rc.clone();
        }
        let rc = Rc::new(p.clone());
        self.interned.insert(p, rc.clone());
        rc
    }

    fn add_gates(&mut self, layer: u32, gates: u64, wires: u64, fanin: u64) {
        if gates == 0 {
            return;
        }
        let t = &mut self.totals;
        t.gates += gates;
        t.wires += wires;
        t.max_fanin = t.max_fanin.max(fanin);
        if t.per_layer_gate_counts.len() < layer as usize {
            t.per_layer_gate_counts.resize(layer as usize, 0);
        }
        t.per_layer_gate_counts[layer as usize - 1] += gates;
    }

    /// Plans one nonnegative part and returns its live bit positions as groups.
    fn part(&mut self, layer: u32, groups: &[Group]) -> Vec<Group> {
        let exp_groups: Vec<ExpGroup> = groups
            .iter()
            .map(|g| ExpGroup {
                exp: g.exp,
                count: g.count,
                mass: BigUint::from(g.mass),
            })
            .collect();
        let plan = PartPlan::new(&exp_groups);
        let ys: u64 = plan.low.iter().map(|lb| 1u64 << lb.k).sum::<u64>()
            + if plan.top > 0 { 1u64 << plan.top } else { 0 };
        let outs = plan.low.len() as u64 + u64::from(plan.top);
        self.add_gates(layer + 1, ys, 0, 0);
        self.add_gates(layer + 2, outs, plan.wires(), plan.max_fanin());
        plan.live_bits()
            .map(|exp| Group {
                exp,
                count: 1,
                mass: 1,
            })
            .collect()
    }
}

fn push_group(part: &mut BTreeMap<u32, (u64, u128)>, exp: u32, count: u64, mass: u128) {
    let e = part.entry(exp).or_insert((0, 0));
    e.0 += count;
    e.1 = e.1.checked_add(mass).expect("cost model mass overflow");
}

fn collect(part: BTreeMap<u32, (u64, u128)>) -> Vec<Group> {
    part.into_iter()
        .map(|(exp, (count, mass))| Group { exp, count, mass })
        .collect()
}

fn sign_parts(p: &Profile) -> [(&[Group], i8); 2] {
    [(&p.pos, 1), (&p.neg, -1)]
}

impl Fabric for CostModel {
    type Value = Rc<Profile>;

    fn zero_value(&mut self) -> Rc<Profile> {
        self.intern(Profile::default())
    }

    fn weighted_sum(&mut self, terms: &[(i64, &Rc<Profile>)]) -> Rc<Profile> {
        let mut pos = BTreeMap::new();
        let mut neg = BTreeMap::new();
        let mut layer = 0;
        for &(c, v) in terms {
            if c == 0 || v.is_zero() {
                continue;
            }
            layer = layer.max(v.layer);
            let shift = c.unsigned_abs().trailing_zeros();
            let odd = u128::from(c.unsigned_abs() >> shift);
            for (groups, s) in sign_parts(v) {
                let part = if (c > 0) == (s > 0) { &mut pos } else { &mut neg };
                for g in groups {
                    let mass = g.mass.checked_mul(odd).expect("cost model mass overflow");
                    push_group(part, g.exp + shift, g.count, mass);
                }
            }
        }
        if pos.is_empty() && neg.is_empty() {
            return self.zero_value();
        }
        let pos = self.part(layer, &collect(pos));
        let neg = self.part(layer, &collect(neg));
        self.intern(Profile {
            layer: layer + 2,
            pos,
            neg,
        })
    }

    fn pair_product(&mut self, x: &Rc<Profile>, y: &Rc<Profile>) -> Rc<Profile> {
        let mut pos = BTreeMap::new();
        let mut neg = BTreeMap::new();
        let mut gates = 0;
        for (xp, xs) in sign_parts(x) {
            for (yp, ys) in sign_parts(y) {
                let part = if xs * ys > 0 { &mut pos } else { &mut neg };
                for gx in xp {
                    for gy in yp {
                        let n = gx.count * gy.count;
                        gates += n;
                        push_group(part, gx.exp + gy.exp, n, u128::from(n));
                    }
                }
            }
        }
        let layer = x.layer.max(y.layer) + 1;
        self.add_gates(layer, gates, 2 * gates, 2);
        if gates == 0 {
            return self.zero_value();
        }
        self.intern(Profile {
            layer,
            pos: collect(pos),
            neg: collect(neg),
        })
    }

    fn triple_product(&mut self, x: &Rc<Profile>, y: &Rc<Profile>, z: &Rc<Profile>) -> Rc<Profile> {
        let mut pos = BTreeMap::new();
        let mut neg = BTreeMap::new();
        let mut gates = 0;
        for (xp, xs) in sign_parts(x) {
            for (yp, ys) in sign_parts(y) {
                for (zp, zs) in sign_parts(z) {
                    let part = if xs * ys * zs > 0 { &mut pos } else { &mut neg };
                    for gx in xp {
                        for gy in yp {
                            for gz in zp {
                                let n = gx.count * gy.count * gz.count;
                                gates += n;
                                push_group(part, gx.exp + gy.exp + gz.exp, n, u128::from(n));
                            }
                        }
                    }
                }
            }
        }
        let layer = x.layer.max(y.layer).max(z.layer) + 1;
        self.add_gates(layer, gates, 3 * gates, 3);
        if gates == 0 {
            return self.zero_value();
        }
        self.intern(Profile {
            layer,
            pos: collect(pos),
            neg: collect(neg),
        })
    }

    fn compare(&mut self, terms: &[(i64, &Rc<Profile>)], _threshold: &BigInt) -> Rc<Profile> {
        let live = terms.iter().filter(|(c, _)| *c != 0);
        let atoms: u64 = live.clone().map(|(_, v)| v.atoms()).sum();
        let layer = live.map(|(_, v)| v.layer).max().unwrap_or(0) + 1;
        self.add_gates(layer, 1, atoms, atoms);
        self.intern(Profile {
            layer,
            pos: vec![Group {
                exp: 0,
                count: 1,
                mass: 1,
            }],
            neg: Vec::new(),
        })
    }

    fn gates(&self) -> u64 {
        self.totals.gates
    }
}

/// Plain integer arithmetic with the same interface; emits nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct Evaluator;

impl Fabric for Evaluator {
    type Value = BigInt;

    fn zero_value(&mut self) -> BigInt {
        BigInt::default()
    }

    fn weighted_sum(&mut self, terms: &[(i64, &BigInt)]) -> BigInt {
        terms.iter().map(|&(c, v)| BigInt::from(c) * v).sum()
    }

    fn pair_product(&mut self, x: &BigInt, y: &BigInt) -> BigInt {
        x * y
    }

    fn triple_product(&mut self, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
        x * y * z
    }

    fn compare(&mut self, terms: &[(i64, &BigInt)], threshold: &BigInt) -> BigInt {
        BigInt::from(u8::from(self.weighted_sum(terms) >= *threshold))
    }

    fn gates(&self) -> u64 {
        0
    }
}
