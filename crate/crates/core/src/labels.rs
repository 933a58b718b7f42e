//! Signal labels and the sign-magnitude encoding of matrix entries.
//!
//! Entry bits are labelled `X[i][j].pos.bit{k}` / `X[i][j].neg.bit{k}`
//! (0-based indices, little-endian bits); single edge variables are `x[i][j]`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::circuit::CONST_ZERO_LABEL;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    Const0,
    Bit {
        name: String,
        i: usize,
        j: usize,
        neg: bool,
        bit: u32,
    },
    Edge {
        i: usize,
        j: usize,
    },
    Decision,
}

pub const DECISION_LABEL: &str = "decision";

pub fn bit_label(name: &str, i: usize, j: usize, neg: bool, bit: u32) -> String {
    let part = if neg { "neg" } else { "pos" };
    format!("{name}[{i}][{j}].{part}.bit{bit}")
}

pub fn edge_label(i: usize, j: usize) -> String {
    format!("x[{i}][{j}]")
}

/// Parses `[i][j]` at the start of `s`, returning the indices and the rest.
fn indices(s: &str) -> Option<(usize, usize, &str)> {
    let s = s.strip_prefix('[')?;
    let (i, s) = s.split_once(']')?;
    let s = s.strip_prefix('[')?;
    let (j, rest) = s.split_once(']')?;
    Some((i.parse().ok()?, j.parse().ok()?, rest))
}

pub fn parse_label(label: &str) -> Result<Label> {
    let bad = || Error::BadLabel(label.to_string());
    if label == CONST_ZERO_LABEL {
        return Ok(Label::Const0);
    }
    if label == DECISION_LABEL {
        return Ok(Label::Decision);
    }
    if let Some(rest) = label.strip_prefix('x') {
        if let Some((i, j, "")) = indices(rest) {
            return Ok(Label::Edge { i, j });
        }
    }
    let open = label.find('[').ok_or_else(bad)?;
    let (name, rest) = label.split_at(open);
    if name.is_empty() {
        return Err(bad());
    }
    let (i, j, rest) = indices(rest).ok_or_else(bad)?;
    let (neg, bit) = if let Some(b) = rest.strip_prefix(".pos.bit") {
        (false, b)
    } else if let Some(b) = rest.strip_prefix(".neg.bit") {
        (true, b)
    } else {
        return Err(bad());
    };
    let bit = bit.parse().map_err(|_| bad())?;
    Ok(Label::Bit {
        name: name.to_string(),
        i,
        j,
        neg,
        bit,
    })
}

/// Input bits for a circuit whose labels name entries of `matrices`.
///
/// Every entry referenced by a label must fit in the bits the circuit
/// provides for it.
pub fn encode_inputs(labels: &[String], matrices: &BTreeMap<&str, &IntMatrix>) -> Result<Vec<bool>> {
    let parsed: Vec<Label> = labels.iter().map(|l| parse_label(l)).collect::<Result<_>>()?;
    let mut width: BTreeMap<(&str, usize, usize), u32> = BTreeMap::new();
    for label in &parsed {
        if let Label::Bit { name, i, j, bit, .. } = label {
            let w = width.entry((name.as_str(), *i, *j)).or_default();
            *w = (*w).max(bit + 1);
        }
    }
    let entry = |name: &str, i: usize, j: usize| -> Result<&BigInt> {
        let m = matrices
            .get(name)
            .ok_or_else(|| Error::MissingInput(name.to_string()))?;
        if i >= m.dim() || j >= m.dim() {
            return Err(Error::MissingInput(format!("{name}[{i}][{j}]")));
        }
        Ok(&m[(i, j)])
    };
    for (&(name, i, j), &w) in &width {
        if entry(name, i, j)?.magnitude().bits() > u64::from(w) {
            return Err(Error::EntryTooWide {
                label: format!("{name}[{i}][{j}]"),
            });
        }
    }
    parsed
        .iter()
        .map(|label| match label {
            Label::Const0 => Ok(false),
            Label::Bit {
                name,
                i,
                j,
                neg,
                bit,
            } => {
                let v = entry(name, *i, *j)?;
                Ok(v.is_negative() == *neg && !v.is_zero() && v.magnitude().bit(u64::from(*bit)))
            }
            Label::Edge { i, j } => {
                let v = entry("x", *i, *j)?;
                if v.is_negative() || v.magnitude().bits() > 1 {
                    Err(Error::NotAdjacency)
                } else {
                    Ok(!v.is_zero())
                }
            }
            Label::Decision => Err(Error::BadLabel(DECISION_LABEL.to_string())),
        })
        .collect()
}

/// Reassembles the signed matrix `name` from labelled output bits.
pub fn decode_matrix(labels: &[String], bits: &[bool], name: &str) -> Result<IntMatrix> {
    if labels.len() != bits.len() {
        return Err(Error::InputLength {
            expected: labels.len(),
            got: bits.len(),
        });
    }
    let mut entries: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
    let mut dim = 0;
    for (label, &on) in labels.iter().zip(bits) {
        if let Label::Bit {
            name: n,
            i,
            j,
            neg,
            bit,
        } = parse_label(label)?
        {
            if n != name {
                continue;
            }
            dim = dim.max(i + 1).max(j + 1);
            let e = entries.entry((i, j)).or_default();
            if on {
                let v = BigInt::from(1u8) << bit;
                if neg {
                    *e -= v;
                } else {
                    *e += v;
                }
            }
        }
    }
    let mut m = IntMatrix::zeros(dim);
    for ((i, j), v) in entries {
        m[(i, j)] = v;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        let l = bit_label("A", 3, 2, false, 0);
        assert_eq!(l, "A[3][2].pos.bit0");
        assert_eq!(
            parse_label(&l).unwrap(),
            Label::Bit {
                name: "A".into(),
                i: 3,
                j: 2,
                neg: false,
                bit: 0
            }
        );
        assert_eq!(parse_label("x[0][5]").unwrap(), Label::Edge { i: 0, j: 5 });
        assert_eq!(parse_label("const0").unwrap(), Label::Const0);
        for bad in ["A[1].pos.bit0", "A[1][2].mid.bit0", "[1][2].pos.bit0", "A[1][2].pos.bitx"] {
            assert!(parse_label(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn decode_examples() {
        // pos = 0110, neg = 0001
        let labels: Vec<String> = (0..4)
            .map(|k| bit_label("C", 0, 0, false, k))
            .chain((0..4).map(|k| bit_label("C", 0, 0, true, k)))
            .collect();
        let bits = [false, true, true, false, true, false, false, false];
        assert_eq!(decode_matrix(&labels, &bits, "C").unwrap()[(0, 0)], BigInt::from(5));
        let bits = [true, false, true, false, true, false, true, false];
        assert_eq!(decode_matrix(&labels, &bits, "C").unwrap()[(0, 0)], BigInt::from(0));
        assert!(decode_matrix(&labels, &bits[..3], "C").is_err());
    }

    #[test]
    fn encode_checks_width() {
        let labels: Vec<String> = [CONST_ZERO_LABEL.to_string()]
            .into_iter()
            .chain((0..2).map(|k| bit_label("A", 0, 0, false, k)))
            .chain((0..2).map(|k| bit_label("A", 0, 0, true, k)))
            .collect();
        let ok = IntMatrix::from_i64_rows(&[&[-3]]);
        let mats = BTreeMap::from([("A", &ok)]);
        assert_eq!(
            encode_inputs(&labels, &mats).unwrap(),
            [false, false, false, true, true]
        );
        let wide = IntMatrix::from_i64_rows(&[&[4]]);
        let mats = BTreeMap::from([("A", &wide)]);
        assert!(matches!(
            encode_inputs(&labels, &mats),
            Err(Error::EntryTooWide { .. })
        ));
        assert!(matches!(
            encode_inputs(&labels, &BTreeMap::new()),
            Err(Error::MissingInput(_))
        ));
    }
}
