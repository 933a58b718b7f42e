use num_bigint::BigInt;
use proptest::prelude::*;
use tcmm::netlist::{netlist_to_string, read_netlist};
use tcmm_core::{
    build_matmul_circuit, evaluate, CircuitBuilder, FmmAlgorithm, MatmulCircuitPlan, Regime,
    Signal, ThresholdCircuit,
};

#[test]
fn strassen_matmul_round_trips() {
    let alg = FmmAlgorithm::strassen();
    let plan = MatmulCircuitPlan::new(&alg, 4, 2, Regime::LogLog).unwrap();
    let c = build_matmul_circuit(&alg, &plan).unwrap();
    let back = read_netlist(netlist_to_string(&c).as_bytes()).unwrap();
    assert_eq!(back, c);
    assert_eq!(netlist_to_string(&back), netlist_to_string(&c));
}

/// Random layered circuit: `(inputs, gates as (sources, weights, threshold))`.
fn circuit() -> impl Strategy<Value = ThresholdCircuit> {
    (1usize..6, prop::collection::vec((any::<u64>(), -200i64..200, 0u32..90), 1..12)).prop_map(
        |(inputs, gates)| {
            let mut b = CircuitBuilder::new();
            let mut sigs: Vec<Signal> = (0..inputs).map(|i| b.add_input(format!("in{i}"))).collect();
            for (pick, w, shift) in gates {
                let a = sigs[(pick % sigs.len() as u64) as usize];
                let c = sigs[((pick >> 20) % sigs.len() as u64) as usize];
                let w = BigInt::from(w) << shift;
                let g = b.add_gate([(a, w.clone()), (c, BigInt::from(1))], -w);
                sigs.push(g);
            }
            let last = *sigs.last().unwrap();
            b.add_output(last, "out");
            b.add_output(sigs[0], "first");
            b.set_metadata("note", "random");
            b.finish()
        },
    )
}

proptest! {
    #[test]
    fn random_circuits_round_trip(c in circuit(), bits in any::<u8>()) {
        let back = read_netlist(netlist_to_string(&c).as_bytes()).unwrap();
        prop_assert_eq!(&back, &c);
        let inputs: Vec<bool> = (0..c.num_inputs()).map(|i| bits >> (i % 8) & 1 == 1).collect();
        prop_assert_eq!(evaluate(&back, &inputs).unwrap(), evaluate(&c, &inputs).unwrap());
    }
}

#[test]
fn forward_reference_in_the_middle() {
    let mut b = CircuitBuilder::new();
    let x = b.add_input("x");
    let mut prev = x;
    for _ in 0..10 {
        prev = b.add_gate([(prev, BigInt::from(1)), (x, BigInt::from(1))], BigInt::from(1));
    }
    b.add_output(prev, "y");
    let text = netlist_to_string(&b.finish());
    let lines: Vec<String> = text.lines().map(str::to_string).collect();
    // line 0 is the header, gate g is on line g + 1
    let patched: Vec<String> = lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if i == 6 {
                l.replace(r#""kind":"gate","index":4"#, r#""kind":"gate","index":9"#)
            } else {
                l.clone()
            }
        })
        .collect();
    let err = read_netlist(patched.join("\n").as_bytes()).unwrap_err();
    assert!(err.to_string().contains("gate 5 references gate 9"), "{err}");
}
