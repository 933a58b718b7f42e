use num_bigint::BigInt;
use proptest::prelude::*;
use tcmm_core::arith::{
    build_msb_extractor, build_pair_product, build_triple_product, build_weighted_sum,
    signed_input, split_sign, to_bits,
};
use tcmm_core::{
    stats, CircuitBuilder, Operand, Signal, SignalKind, SignedValue, Simulator, ThresholdCircuit,
    WeightedSumSpec,
};

/// Runs a circuit and reads any signal.
struct Run<'c> {
    inputs: Vec<bool>,
    sim: Simulator<'c>,
}

impl<'c> Run<'c> {
    fn new(c: &'c ThresholdCircuit, inputs: Vec<bool>) -> Self {
        let mut sim = Simulator::new(c);
        sim.run(&inputs).unwrap();
        Run { inputs, sim }
    }

    fn bit(&self, s: Signal) -> bool {
        match s.kind() {
            SignalKind::Input(i) => self.inputs[i as usize],
            SignalKind::Gate(g) => self.sim.gate(g as usize),
        }
    }
}

/// Input bits for `signed_input` operands declared in order after const0.
fn encode(values: &[i64], width: u32) -> Vec<bool> {
    let mut bits = vec![false];
    for &v in values {
        let (p, n) = split_sign(&BigInt::from(v));
        bits.extend(to_bits(&p, width).unwrap());
        bits.extend(to_bits(&n, width).unwrap());
    }
    bits
}

fn operands(b: &mut CircuitBuilder, count: usize, width: u32) -> Vec<SignedValue> {
    b.zero();
    (0..count)
        .map(|i| signed_input(b, &format!("x[{i}][0]"), width))
        .collect()
}

fn signed_values(width: u32, max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    let m = (1i64 << width) - 1;
    prop::collection::vec(-m..=m, 1..=max_len)
}

proptest! {
    #[test]
    fn msb_matches_shift(l in 1u32..=12, k_frac in 0.0f64..1.0, s in any::<u64>()) {
        let k = 1 + ((l as f64 * k_frac) as u32).min(l - 1);
        let s = s % (1u64 << l);
        let mut b = CircuitBuilder::new();
        let xs: Vec<Signal> = (0..l).map(|i| b.add_input(format!("s{i}"))).collect();
        let terms: Vec<_> = xs.iter().enumerate().map(|(i, &x)| (BigInt::from(1u64 << i), x)).collect();
        let out = build_msb_extractor(&mut b, &terms, l, k).unwrap();
        let c = b.finish();
        prop_assert_eq!(c.num_gates(), (1usize << k) + 1);
        let run = Run::new(&c, (0..l).map(|i| s >> i & 1 == 1).collect());
        prop_assert_eq!(run.bit(out), (s >> (l - k)) & 1 == 1);
    }

    #[test]
    fn weighted_sum_is_exact(
        width in 1u32..=5,
        seed in prop::collection::vec((-5i64..=5, any::<u64>()), 1..=6),
    ) {
        let m = (1i64 << width) - 1;
        let xs: Vec<i64> = seed.iter().map(|(_, r)| (*r % (2 * m as u64 + 1)) as i64 - m).collect();
        let mut b = CircuitBuilder::new();
        let ops = operands(&mut b, xs.len(), width);
        let spec = WeightedSumSpec {
            terms: seed.iter().zip(ops).map(|((w, _), v)| (*w, Operand::Signed(v))).collect(),
        };
        let out = build_weighted_sum(&mut b, &spec).unwrap();
        prop_assert!(out.width() as u32 <= spec.width_bound());
        for (i, s) in out.pos.iter().chain(&out.neg).enumerate() {
            b.add_output(*s, format!("y{i}"));
        }
        let c = b.finish();
        prop_assert!(stats(&c).depth <= 2);
        let run = Run::new(&c, encode(&xs, width));
        let want: i64 = seed.iter().zip(&xs).map(|((w, _), x)| w * x).sum();
        prop_assert_eq!(out.value(|s| run.bit(s)), BigInt::from(want));
    }

    #[test]
    fn nested_sums_compose(xs in signed_values(3, 4), w1 in -3i64..=3, w2 in -3i64..=3) {
        let mut b = CircuitBuilder::new();
        let ops = operands(&mut b, xs.len(), 3);
        let first = WeightedSumSpec {
            terms: ops.iter().map(|v| (w1, Operand::Signed(v.clone()))).collect(),
        };
        let inner = build_weighted_sum(&mut b, &first).unwrap();
        let second = WeightedSumSpec {
            terms: vec![(w2, Operand::Signed(inner)), (1, Operand::Signed(ops[0].clone()))],
        };
        let outer = build_weighted_sum(&mut b, &second).unwrap();
        let c = b.finish();
        let run = Run::new(&c, encode(&xs, 3));
        let want = w2 * w1 * xs.iter().sum::<i64>() + xs[0];
        prop_assert_eq!(outer.value(|s| run.bit(s)), BigInt::from(want));
    }

    #[test]
    fn products_are_exact(width in 1u32..=4, raw in prop::array::uniform3(any::<u32>())) {
        let m = (1i64 << width) - 1;
        let v: Vec<i64> = raw.iter().map(|r| (*r as i64) % (2 * m + 1) - m).collect();
        let mut b = CircuitBuilder::new();
        let ops = operands(&mut b, 3, width);
        let pair = build_pair_product(&mut b, &ops[0], &ops[1]);
        let triple = build_triple_product(&mut b, &ops[0], &ops[1], &ops[2]);
        let c = b.finish();
        let run = Run::new(&c, encode(&v, width));
        prop_assert_eq!(pair.value(|s| run.bit(s)), BigInt::from(v[0] * v[1]));
        prop_assert_eq!(triple.value(|s| run.bit(s)), BigInt::from(v[0] * v[1] * v[2]));
    }

    #[test]
    fn sums_of_products(xs in signed_values(2, 3), ys in signed_values(2, 3), w in -2i64..=2) {
        let n = xs.len().min(ys.len());
        let mut b = CircuitBuilder::new();
        let xo = operands(&mut b, n, 2);
        let yo: Vec<_> = (0..n).map(|i| signed_input(&mut b, &format!("y[{i}][0]"), 2)).collect();
        let spec = WeightedSumSpec {
            terms: xo.iter().zip(&yo)
                .map(|(x, y)| (w, Operand::Repr(build_pair_product(&mut b, x, y))))
                .collect(),
        };
        let out = build_weighted_sum(&mut b, &spec).unwrap();
        let c = b.finish();
        let mut bits = encode(&xs[..n], 2);
        bits.extend(encode(&ys[..n], 2).into_iter().skip(1));
        let run = Run::new(&c, bits);
        let want: i64 = (0..n).map(|i| w * xs[i] * ys[i]).sum();
        prop_assert_eq!(out.value(|s| run.bit(s)), BigInt::from(want));
    }
}

#[test]
fn msb_example_five() {
    let mut b = CircuitBuilder::new();
    let xs: Vec<Signal> = (0..3).map(|i| b.add_input(format!("s{i}"))).collect();
    let terms: Vec<_> = xs.iter().enumerate().map(|(i, &x)| (BigInt::from(1 << i), x)).collect();
    let out = build_msb_extractor(&mut b, &terms, 3, 1).unwrap();
    b.add_output(out, "msb");
    let c = b.finish();
    assert_eq!(tcmm_core::evaluate(&c, &[true, false, true]).unwrap(), [true]);
}

#[test]
fn lemma_three_gate_count() {
    let mut b = CircuitBuilder::new();
    let zero = b.zero();
    let v: Vec<SignedValue> = (0..3)
        .map(|i| {
            let pos = (0..2).map(|k| b.add_input(format!("v{i}.{k}"))).collect();
            SignedValue::new(pos, Vec::new(), zero)
        })
        .collect();
    build_triple_product(&mut b, &v[0], &v[1], &v[2]);
    assert_eq!(b.finish().num_gates(), 8);
}
