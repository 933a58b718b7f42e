//! Arithmetic building blocks: MSB extraction, depth-2 weighted sums, and
//! depth-1 products, all over sign-magnitude operands.
//!
//! A weighted sum `s = sum_i w_i x_i` over signed operands is split into
//! `s = s+ - s-` where both parts are nonnegative weighted sums of bits
//! ("atoms"). Each part is then computed bit by bit:
//!
//! * bit `j` (1-based, `j <= b`) from the truncated sum `s_j` of all atoms
//!   whose weight is not divisible by `2^j`; `s` and `s_j` agree mod `2^j`.
//!   With `s_j < 2^{L_j}`, bit `j` is the `(L_j - j + 1)`-th most significant
//!   bit of `s_j`, read off by an MSB extractor.
//! * the bits above `b` from one shared row of comparators `s >= i * 2^b`.
//!
//! All bounds are the exact maxima of the part, so widths and extractor
//! sizes are as small as the operands allow.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use alloc::{format, vec};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use crate::circuit::{CircuitBuilder, FaninId, Signal};
use crate::error::{Error, Result};

/// Minimal `l` with `m < 2^l`.
pub fn bits(m: &BigUint) -> u32 {
    m.bits() as u32
}

/// `bits` for machine integers.
pub fn bits_u64(m: u64) -> u32 {
    64 - m.leading_zeros()
}

/// Sign-magnitude value `pos - neg`; bit vectors are little-endian and of equal width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedValue {
    pub pos: Vec<Signal>,
    pub neg: Vec<Signal>,
}

impl SignedValue {
    /// Pads the shorter part with the constant-zero signal.
    pub fn new(mut pos: Vec<Signal>, mut neg: Vec<Signal>, zero: Signal) -> Self {
        let w = pos.len().max(neg.len());
        pos.resize(w, zero);
        neg.resize(w, zero);
        SignedValue { pos, neg }
    }

    pub fn zero() -> Self {
        SignedValue {
            pos: Vec::new(),
            neg: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.pos.len()
    }

    /// Integer value under a signal assignment.
    pub fn value(&self, bit: impl Fn(Signal) -> bool) -> BigInt {
        let part = |sigs: &[Signal]| {
            sigs.iter()
                .enumerate()
                .filter(|(_, &s)| bit(s))
                .fold(BigInt::zero(), |acc, (i, _)| acc + (BigInt::one() << i))
        };
        part(&self.pos) - part(&self.neg)
    }
}

/// An integer as an integer-weighted sum of bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Representation {
    pub terms: Vec<(BigInt, Signal)>,
}

impl Representation {
    pub fn value(&self, bit: impl Fn(Signal) -> bool) -> BigInt {
        self.terms
            .iter()
            .filter(|(_, s)| bit(*s))
            .map(|(w, _)| w)
            .sum()
    }
}

/// Operand accepted by the weighted-sum builder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Signed(SignedValue),
    Repr(Representation),
}

impl Operand {
    /// Signed `(weight, bit)` pairs whose sum is the operand's value.
    fn atoms(&self) -> Vec<(BigInt, Signal)> {
        match self {
            Operand::Signed(v) => {
                let mut out = Vec::with_capacity(2 * v.width());
                for (i, &s) in v.pos.iter().enumerate() {
                    out.push((BigInt::one() << i, s));
                }
                for (i, &s) in v.neg.iter().enumerate() {
                    out.push((-(BigInt::one() << i), s));
                }
                out
            }
            Operand::Repr(r) => r.terms.clone(),
        }
    }

    pub fn value(&self, bit: impl Fn(Signal) -> bool) -> BigInt {
        match self {
            Operand::Signed(v) => v.value(bit),
            Operand::Repr(r) => r.value(bit),
        }
    }

    pub fn as_signed(&self) -> Option<&SignedValue> {
        match self {
            Operand::Signed(v) => Some(v),
            Operand::Repr(_) => None,
        }
    }
}

/// Terms of one weighted sum.
#[derive(Debug, Clone, Default)]
pub struct WeightedSumSpec {
    pub terms: Vec<(i64, Operand)>,
}

impl WeightedSumSpec {
    pub fn n(&self) -> usize {
        self.terms.len()
    }

    pub fn max_weight(&self) -> u64 {
        self.terms.iter().map(|(w, _)| w.unsigned_abs()).max().unwrap_or(0)
    }

    /// Widest operand in bits (for representations: highest weight exponent + 1).
    pub fn max_width(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, op)| match op {
                Operand::Signed(v) => v.width() as u32,
                Operand::Repr(r) => r
                    .terms
                    .iter()
                    .map(|(w, _)| bits(w.magnitude()))
                    .max()
                    .unwrap_or(0),
            })
            .max()
            .unwrap_or(0)
    }

    /// The generic width bound `bits(n) + bits(w) + b` of the result.
    pub fn width_bound(&self) -> u32 {
        bits_u64(self.n() as u64) + bits_u64(self.max_weight()) + self.max_width()
    }
}

/// Atoms of one part sharing a weight exponent: weights are `odd * 2^exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ExpGroup {
    pub exp: u32,
    pub count: u64,
    /// Sum of the odd factors.
    pub mass: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LowBit {
    /// 1-based bit position.
    pub j: u32,
    pub l: u32,
    pub k: u32,
    /// Atoms in the truncated sum.
    pub fanin: u64,
}

/// Gate layout of one nonnegative part of a weighted sum.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct PartPlan {
    /// Result width `L`.
    pub width: u32,
    /// Positions handled by truncated sums, `1..=b`.
    pub b: u32,
    pub low: Vec<LowBit>,
    /// Number of bits above `b` (`L - b`), zero if none.
    pub top: u32,
    pub atoms: u64,
}

impl PartPlan {
    /// `groups` must be sorted by exponent.
    pub(crate) fn new(groups: &[ExpGroup]) -> Self {
        let atoms: u64 = groups.iter().map(|g| g.count).sum();
        if atoms == 0 {
            return PartPlan::default();
        }
        let b = groups.last().map_or(0, |g| g.exp + 1);
        let total: BigUint = groups.iter().map(|g| &g.mass << g.exp).sum();
        let width = bits(&total);
        let mut low = Vec::new();
        let mut prefix = BigUint::zero();
        let mut fanin = 0u64;
        let mut next = 0;
        for j in 1..=b.min(width) {
            while next < groups.len() && groups[next].exp < j {
                prefix += &groups[next].mass << groups[next].exp;
                fanin += groups[next].count;
                next += 1;
            }
            let l = bits(&prefix);
            if l >= j {
                low.push(LowBit {
                    j,
                    l,
                    k: l - j + 1,
                    fanin,
                });
            }
        }
        PartPlan {
            width,
            b,
            low,
            top: width.saturating_sub(b),
            atoms,
        }
    }

    #[cfg(test)]
    pub(crate) fn gates(&self) -> u64 {
        let low: u64 = self.low.iter().map(|lb| (1u64 << lb.k) + 1).sum();
        let top = if self.top > 0 {
            (1u64 << self.top) + u64::from(self.top)
        } else {
            0
        };
        low + top
    }

    pub(crate) fn wires(&self) -> u64 {
        let low: u64 = self
            .low
            .iter()
            .map(|lb| (1u64 << lb.k) * lb.fanin + (1u64 << lb.k))
            .sum();
        let top = if self.top > 0 {
            (1u64 << self.top) * self.atoms + ((1u64 << (self.top + 1)) - 2)
        } else {
            0
        };
        low + top
    }

    pub(crate) fn max_fanin(&self) -> u64 {
        let low = self
            .low
            .iter()
            .map(|lb| lb.fanin.max(1 << lb.k))
            .max()
            .unwrap_or(0);
        let top = if self.top > 0 {
            self.atoms.max(1 << self.top)
        } else {
            0
        };
        low.max(top)
    }

    /// Bit positions (0-based) that carry a gate output.
    pub(crate) fn live_bits(&self) -> impl Iterator<Item = u32> + '_ {
        self.low
            .iter()
            .map(|lb| lb.j - 1)
            .chain(self.b..self.b + self.top)
    }
}

/// Comparator ladder on an existing fan-in: `2^k` gates
/// `y_i = [s >= i 2^(l-k)]` and an output gate `[sum_{i odd} (y_i - y_{i+1}) >= 1]`.
fn emit_msb(builder: &mut CircuitBuilder, fanin: FaninId, l: u32, k: u32) -> Signal {
    let ys: Vec<Signal> = (1..=1u64 << k)
        .map(|i| builder.gate_on(fanin, BigInt::from(i) << (l - k)))
        .collect();
    select_odd_intervals(builder, &ys, 1)
}

/// Output gate over every `stride`-th comparator: fires iff `s` lies in an odd interval.
fn select_odd_intervals(builder: &mut CircuitBuilder, ys: &[Signal], stride: usize) -> Signal {
    let terms = ys
        .iter()
        .skip(stride - 1)
        .step_by(stride)
        .enumerate()
        .map(|(i, &y)| (y, BigInt::from(if i % 2 == 0 { 1 } else { -1 })));
    builder.add_gate(terms, BigInt::one())
}

/// Computes the `k`-th most significant bit of `s = sum terms` assuming
/// `s` in `[0, 2^l)`, with exactly `2^k + 1` gates in two layers. Outside that
/// range the output is 0.
pub fn build_msb_extractor(
    builder: &mut CircuitBuilder,
    terms: &[(BigInt, Signal)],
    l: u32,
    k: u32,
) -> Result<Signal> {
    if l == 0 || k == 0 || k > l {
        return Err(Error::BitIndexOutOfRange { l, k });
    }
    if k >= 63 {
        return Err(Error::BitIndexOutOfRange { l, k });
    }
    let mut merged: BTreeMap<Signal, BigInt> = BTreeMap::new();
    for (w, s) in terms {
        if !builder.is_zero(*s) {
            *merged.entry(*s).or_default() += w;
        }
    }
    let terms: Vec<_> = merged.into_iter().filter(|(_, w)| !w.is_zero()).collect();
    let fanin = builder.new_fanin(None, terms);
    Ok(emit_msb(builder, fanin, l, k))
}

/// Emits one nonnegative part; returns its little-endian bits.
fn emit_part(builder: &mut CircuitBuilder, atoms: BTreeMap<Signal, BigUint>) -> Vec<Signal> {
    // (exp, odd, signal), sorted by exponent then signal
    let mut split: Vec<(u32, BigUint, Signal)> = atoms
        .into_iter()
        .map(|(s, w)| {
            let tz = w.trailing_zeros().unwrap_or(0);
            (tz as u32, w >> tz, s)
        })
        .collect();
    split.sort_by(|a, b| (a.0, a.2).cmp(&(b.0, b.2)));
    let mut groups: Vec<ExpGroup> = Vec::new();
    for (exp, odd, _) in &split {
        match groups.last_mut() {
            Some(g) if g.exp == *exp => {
                g.count += 1;
                g.mass += odd;
            }
            _ => groups.push(ExpGroup {
                exp: *exp,
                count: 1,
                mass: odd.clone(),
            }),
        }
    }
    let plan = PartPlan::new(&groups);
    let zero = builder.zero();
    let mut out = vec![zero; plan.width as usize];

    let mut chain: Option<FaninId> = None;
    let mut next = 0;
    let mut extend = |builder: &mut CircuitBuilder, chain: &mut Option<FaninId>, below: u32| {
        let mut pending = Vec::new();
        while next < split.len() && split[next].0 < below {
            let (exp, odd, s) = &split[next];
            pending.push((*s, BigInt::from(odd.clone()) << *exp));
            next += 1;
        }
        if !pending.is_empty() || chain.is_none() {
            *chain = Some(builder.new_fanin(*chain, pending));
        }
        chain.unwrap()
    };
    for lb in &plan.low {
        let fanin = extend(builder, &mut chain, lb.j);
        out[lb.j as usize - 1] = emit_msb(builder, fanin, lb.l, lb.k);
    }
    if plan.top > 0 {
        let fanin = extend(builder, &mut chain, u32::MAX);
        let ys: Vec<Signal> = (1..=1u64 << plan.top)
            .map(|i| builder.gate_on(fanin, BigInt::from(i) << plan.b))
            .collect();
        for k in 1..=plan.top {
            // k-th most significant bit; its comparators are every 2^(a-k)-th y
            let stride = 1usize << (plan.top - k);
            out[(plan.width - k) as usize] = select_odd_intervals(builder, &ys, stride);
        }
    }
    out
}

/// Depth-2 weighted sum of signed operands or representations.
pub fn build_weighted_sum(
    builder: &mut CircuitBuilder,
    spec: &WeightedSumSpec,
) -> Result<SignedValue> {
    if spec.terms.is_empty() {
        return Err(Error::EmptySum);
    }
    Ok(weighted_sum_terms(
        builder,
        spec.terms.iter().map(|(c, op)| (*c, op)),
    ))
}

pub(crate) fn weighted_sum_terms<'a>(
    builder: &mut CircuitBuilder,
    terms: impl IntoIterator<Item = (i64, &'a Operand)>,
) -> SignedValue {
    let mut pos: BTreeMap<Signal, BigUint> = BTreeMap::new();
    let mut neg: BTreeMap<Signal, BigUint> = BTreeMap::new();
    for (c, op) in terms {
        if c == 0 {
            continue;
        }
        let c = BigInt::from(c);
        for (w, s) in op.atoms() {
            if builder.is_zero(s) {
                continue;
            }
            let total = &c * w;
            let part = match total.sign() {
                Sign::Plus => &mut pos,
                Sign::Minus => &mut neg,
                Sign::NoSign => continue,
            };
            *part.entry(s).or_default() += total.magnitude();
        }
    }
    let zero = builder.zero();
    let pos = emit_part(builder, pos);
    let neg = emit_part(builder, neg);
    SignedValue::new(pos, neg, zero)
}

/// Sign pattern helper: `(part bits, sign)` for the positive and negative part.
fn parts(v: &SignedValue) -> [(&[Signal], i8); 2] {
    [(&v.pos, 1), (&v.neg, -1)]
}

/// One layer of AND gates: a representation of `x * y * z`.
///
/// Every triple of bits from every sign combination gets a gate
/// `x_i + y_j + z_k >= 3` carrying weight `±2^(i+j+k)`; bits that are the
/// constant zero are pruned.
pub fn build_triple_product(
    builder: &mut CircuitBuilder,
    x: &SignedValue,
    y: &SignedValue,
    z: &SignedValue,
) -> Representation {
    let mut terms = Vec::new();
    for (xp, xs) in parts(x) {
        for (yp, ys) in parts(y) {
            for (zp, zs) in parts(z) {
                let sign = xs * ys * zs;
                for (i, &xi) in xp.iter().enumerate() {
                    if builder.is_zero(xi) {
                        continue;
                    }
                    for (j, &yj) in yp.iter().enumerate() {
                        if builder.is_zero(yj) {
                            continue;
                        }
                        for (k, &zk) in zp.iter().enumerate() {
                            if builder.is_zero(zk) {
                                continue;
                            }
                            let one = BigInt::one();
                            let g = builder.add_gate(
                                [(xi, one.clone()), (yj, one.clone()), (zk, one)],
                                BigInt::from(3),
                            );
                            let w = BigInt::one() << (i + j + k);
                            terms.push((if sign > 0 { w } else { -w }, g));
                        }
                    }
                }
            }
        }
    }
    Representation { terms }
}

/// One layer of AND gates: a representation of `x * y` (`x_i + y_j >= 2`).
pub fn build_pair_product(
    builder: &mut CircuitBuilder,
    x: &SignedValue,
    y: &SignedValue,
) -> Representation {
    let mut terms = Vec::new();
    for (xp, xs) in parts(x) {
        for (yp, ys) in parts(y) {
            let sign = xs * ys;
            for (i, &xi) in xp.iter().enumerate() {
                if builder.is_zero(xi) {
                    continue;
                }
                for (j, &yj) in yp.iter().enumerate() {
                    if builder.is_zero(yj) {
                        continue;
                    }
                    let one = BigInt::one();
                    let g = builder.add_gate([(xi, one.clone()), (yj, one)], BigInt::from(2));
                    let w = BigInt::one() << (i + j);
                    terms.push((if sign > 0 { w } else { -w }, g));
                }
            }
        }
    }
    Representation { terms }
}

/// Adds `width`-bit sign-magnitude inputs labelled `{name}.pos.bit{k}` / `{name}.neg.bit{k}`.
pub fn signed_input(builder: &mut CircuitBuilder, name: &str, width: u32) -> SignedValue {
    let pos = (0..width)
        .map(|k| builder.add_input(format!("{name}.pos.bit{k}")))
        .collect();
    let neg = (0..width)
        .map(|k| builder.add_input(format!("{name}.neg.bit{k}")))
        .collect();
    SignedValue { pos, neg }
}

/// Unsigned value of `|v|` split into `width` bits, `None` if it does not fit.
pub fn to_bits(v: &BigUint, width: u32) -> Option<Vec<bool>> {
    if bits(v) > width {
        return None;
    }
    Some((0..width).map(|k| v.bit(u64::from(k))).collect())
}

/// Magnitudes of the sign-magnitude encoding of `v`.
pub fn split_sign(v: &BigInt) -> (BigUint, BigUint) {
    if v.is_negative() {
        (BigUint::zero(), v.magnitude().clone())
    } else {
        (v.magnitude().clone(), BigUint::zero())
    }
}
