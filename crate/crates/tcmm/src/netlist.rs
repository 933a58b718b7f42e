//! `tcmm-netlist-v1` JSON files.
//!
//! Weights and thresholds are decimal strings so that values of any size
//! survive the round trip. Gates are written one per line.

use std::io::{Read, Write};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use tcmm_core::{CircuitBuilder, Signal, SignalKind, ThresholdCircuit};

use crate::error::{Result, ToolError};

pub const FORMAT: &str = "tcmm-netlist-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Input,
    Gate,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SrcDoc {
    kind: Kind,
    index: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaninDoc {
    src: SrcDoc,
    weight: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    threshold: String,
    fanin: Vec<FaninDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetlistDoc {
    format: String,
    num_inputs: u64,
    input_labels: Vec<String>,
    gates: Vec<GateDoc>,
    outputs: Vec<SrcDoc>,
    output_labels: Vec<String>,
    metadata: Map<String, Value>,
}

fn src_doc(s: Signal) -> SrcDoc {
    match s.kind() {
        SignalKind::Input(i) => SrcDoc {
            kind: Kind::Input,
            index: u64::from(i),
        },
        SignalKind::Gate(g) => SrcDoc {
            kind: Kind::Gate,
            index: u64::from(g),
        },
    }
}

fn signal(src: &SrcDoc) -> Result<Signal> {
    let index = u32::try_from(src.index)
        .map_err(|_| ToolError::Format(format!("signal index {} too large", src.index)))?;
    Ok(match src.kind {
        Kind::Input => Signal::input(index),
        Kind::Gate => Signal::gate(index),
    })
}

fn decimal(s: &str, what: &str) -> Result<BigInt> {
    s.parse()
        .map_err(|_| ToolError::Format(format!("{what} {s:?} is not a decimal integer")))
}

/// Streams `circuit` as a netlist document.
pub fn write_netlist<W: Write>(circuit: &ThresholdCircuit, mut w: W) -> std::io::Result<()> {
    write!(w, "{{\"format\":")?;
    serde_json::to_writer(&mut w, FORMAT)?;
    write!(w, ",\"num_inputs\":{},\"input_labels\":", circuit.num_inputs())?;
    serde_json::to_writer(&mut w, circuit.input_labels())?;
    write!(w, ",\"gates\":[")?;
    for g in 0..circuit.num_gates() {
        let doc = GateDoc {
            threshold: circuit.threshold(g).to_string(),
            fanin: circuit
                .fanin(g)
                .into_iter()
                .map(|(s, weight)| FaninDoc {
                    src: src_doc(s),
                    weight: weight.to_string(),
                })
                .collect(),
        };
        w.write_all(if g == 0 { b"\n" } else { b",\n" })?;
        serde_json::to_writer(&mut w, &doc)?;
    }
    write!(w, "\n],\"outputs\":")?;
    let outputs: Vec<SrcDoc> = circuit.outputs().iter().map(|&s| src_doc(s)).collect();
    serde_json::to_writer(&mut w, &outputs)?;
    write!(w, ",\"output_labels\":")?;
    serde_json::to_writer(&mut w, circuit.output_labels())?;
    write!(w, ",\"metadata\":")?;
    serde_json::to_writer(&mut w, circuit.metadata())?;
    writeln!(w, "}}")?;
    w.flush()
}

pub fn netlist_to_string(circuit: &ThresholdCircuit) -> String {
    let mut buf = Vec::new();
    write_netlist(circuit, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Parses and validates a netlist document.
pub fn read_netlist<R: Read>(r: R) -> Result<ThresholdCircuit> {
    let doc: NetlistDoc = serde_json::from_reader(std::io::BufReader::new(r))?;
    if doc.format != FORMAT {
        return Err(ToolError::Format(format!(
            "unsupported format {:?}, expected {FORMAT:?}",
            doc.format
        )));
    }
    if doc.num_inputs != doc.input_labels.len() as u64 {
        return Err(ToolError::Format(format!(
            "num_inputs is {} but there are {} input labels",
            doc.num_inputs,
            doc.input_labels.len()
        )));
    }
    if doc.outputs.len() != doc.output_labels.len() {
        return Err(ToolError::Format(format!(
            "{} outputs but {} output labels",
            doc.outputs.len(),
            doc.output_labels.len()
        )));
    }
    let mut b = CircuitBuilder::new();
    for label in doc.input_labels {
        b.add_input(label);
    }
    for gate in &doc.gates {
        let terms = gate
            .fanin
            .iter()
            .map(|f| Ok((signal(&f.src)?, decimal(&f.weight, "weight")?)))
            .collect::<Result<Vec<_>>>()?;
        b.add_gate_checked(terms, decimal(&gate.threshold, "threshold")?)?;
    }
    for (src, label) in doc.outputs.iter().zip(doc.output_labels) {
        let limit = match src.kind {
            Kind::Input => doc.num_inputs,
            Kind::Gate => doc.gates.len() as u64,
        };
        if src.index >= limit {
            return Err(ToolError::Format(format!(
                "output {label:?} references a missing signal"
            )));
        }
        b.add_output(signal(src)?, label);
    }
    for (k, v) in doc.metadata {
        match v {
            Value::String(s) => b.set_metadata(k, s),
            other => b.set_metadata(k, other.to_string()),
        }
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ThresholdCircuit {
        let mut b = CircuitBuilder::new();
        let x = b.add_input("x");
        let y = b.add_input("y");
        let huge = BigInt::from(3) << 100u32;
        let g = b.add_gate([(x, huge.clone()), (y, BigInt::from(-1))], huge);
        let h = b.add_gate([(g, BigInt::from(1)), (x, BigInt::from(1))], BigInt::from(2));
        b.add_output(h, "out");
        b.add_output(y, "copy");
        b.set_metadata("kind", "example");
        b.finish()
    }

    #[test]
    fn round_trip() {
        let c = tiny();
        let text = netlist_to_string(&c);
        assert!(text.contains("\"3802951800684688204490109616128\""));
        assert_eq!(read_netlist(text.as_bytes()).unwrap(), c);
    }

    #[test]
    fn rejects_forward_references() {
        let text = netlist_to_string(&tiny()).replace(
            r#"{"src":{"kind":"gate","index":0}"#,
            r#"{"src":{"kind":"gate","index":1}"#,
        );
        let err = read_netlist(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("forward reference"), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_bad_numbers() {
        let text = netlist_to_string(&tiny());
        let dup = text.replace(r#"{"kind":"input","index":1}"#, r#"{"kind":"input","index":0}"#);
        assert!(read_netlist(dup.as_bytes()).is_err());
        let bad = text.replace(r#""threshold":"2""#, r#""threshold":"2.5""#);
        assert!(matches!(read_netlist(bad.as_bytes()), Err(ToolError::Format(_))));
        let other = text.replace(FORMAT, "tcmm-netlist-v0");
        assert!(matches!(read_netlist(other.as_bytes()), Err(ToolError::Format(_))));
        assert!(read_netlist(&b"{"[..]).is_err());
    }
}
