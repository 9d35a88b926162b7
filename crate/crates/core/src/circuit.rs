//! Shor-style measurement gadgets for each conversion step, and gate counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::pauli::{Letter, PauliOp};
use crate::rsra::ConversionPath;

fn letter_string(l: Letter) -> String {
    l.as_char().to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    /// A verified cat state on `size` fresh wires.
    PrepareCat { size: usize },
    /// Cat wire `cat` controls `letter` on data qubit `data`.
    Cpauli {
        cat: usize,
        data: usize,
        letter: String,
    },
    /// Transversal X readout of the cat state, giving one parity bit.
    MeasureCatX,
    /// Applied when the parity differs from `target`, the sign bit of the
    /// measured operator.
    CondPauli {
        condition: String,
        target: u8,
        #[serde(with = "qubit_keys")]
        letters: BTreeMap<usize, String>,
    },
}

/// Qubit-indexed maps with string keys; tagged enums buffer their content
/// and cannot read integer keys back directly.
mod qubit_keys {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<usize, String>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<usize, String>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub step: usize,
    pub measure: PauliOp,
    pub cat_size: usize,
    pub ops: Vec<Op>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitBundle {
    pub gadgets: Vec<Gadget>,
    pub total_multiqubit_gates: usize,
}

impl CircuitBundle {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// One gadget per step: controlled Paulis from a cat state onto the support
/// of the measured operator in ascending qubit order, a parity readout, and
/// the correction conditioned on the parity.
pub fn emit(path: &ConversionPath) -> CircuitBundle {
    let gadgets: Vec<Gadget> = path
        .steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            let support: Vec<usize> = step.measure.support().collect();
            let mut ops = vec![Op::PrepareCat {
                size: support.len(),
            }];
            ops.extend(support.iter().enumerate().map(|(cat, &q)| Op::Cpauli {
                cat,
                data: q,
                letter: letter_string(step.measure.letter(q)),
            }));
            ops.push(Op::MeasureCatX);
            ops.push(Op::CondPauli {
                condition: "parity!=target".into(),
                target: step.measure.is_negative() as u8,
                letters: step
                    .correct
                    .support()
                    .map(|q| (q, letter_string(step.correct.letter(q))))
                    .collect(),
            });
            Gadget {
                step: i,
                measure: step.measure.clone(),
                cat_size: support.len(),
                ops,
            }
        })
        .collect();
    CircuitBundle {
        total_multiqubit_gates: gadgets.iter().map(|g| g.cat_size).sum(),
        gadgets,
    }
}

/// Controlled-Pauli count: the total weight of the measured operators.
pub fn gate_count(path: &ConversionPath) -> usize {
    path.steps.iter().map(|s| s.measure.weight()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::StabilizerCode;
    use crate::rsra::{self, ConversionStep};
    use crate::{catalog, fixtures};

    fn table(text: &str) -> ConversionPath {
        rsra::build_path(&rsra::load_fixture_decomposition(text).unwrap()).unwrap()
    }

    #[test]
    fn table1_count() {
        let path = table(fixtures::TABLE1);
        assert_eq!(gate_count(&path), 17);
        let bundle = emit(&path);
        assert_eq!(bundle.total_multiqubit_gates, 17);
        let sizes: Vec<usize> = bundle.gadgets.iter().map(|g| g.cat_size).collect();
        assert_eq!(sizes, [4, 4, 4, 4, 1]);
    }

    #[test]
    fn gadget_structure() {
        for text in [fixtures::TABLE1, fixtures::TABLE2, fixtures::TABLE3] {
            let path = table(text);
            let bundle = emit(&path);
            assert_eq!(bundle.total_multiqubit_gates, gate_count(&path));
            for (g, step) in bundle.gadgets.iter().zip(&path.steps) {
                let touched: Vec<usize> = g
                    .ops
                    .iter()
                    .filter_map(|op| match op {
                        Op::Cpauli { data, .. } => Some(*data),
                        _ => None,
                    })
                    .collect();
                assert_eq!(touched, step.measure.support().collect::<Vec<_>>());
                let Some(Op::CondPauli { letters, .. }) = g.ops.last() else {
                    panic!("gadget must end with the correction");
                };
                assert_eq!(
                    letters.keys().copied().collect::<Vec<_>>(),
                    step.correct.support().collect::<Vec<_>>()
                );
            }
            let text = bundle.to_json();
            let back = CircuitBundle::from_json(&text).unwrap();
            assert_eq!(back, bundle);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn json_shape() {
        let path = table(fixtures::TABLE2);
        let v: serde_json::Value = serde_json::from_str(&emit(&path).to_json()).unwrap();
        let g = &v["gadgets"][0];
        assert_eq!(g["step"], 0);
        assert_eq!(g["measure"], "-YXYZZIXXX");
        assert_eq!(g["cat_size"], 8);
        assert_eq!(g["ops"][0]["op"], "prepare_cat");
        assert_eq!(g["ops"][1]["op"], "cpauli");
        assert_eq!(g["ops"][1]["letter"], "Y");
        assert_eq!(g["ops"][9]["op"], "measure_cat_x");
        assert_eq!(g["ops"][10]["condition"], "parity!=target");
        assert_eq!(g["ops"][10]["target"], 1);
        assert_eq!(g["ops"][10]["letters"]["3"], "Y");
    }

    #[test]
    fn empty_and_single_qubit() {
        let s = catalog::steane7();
        let empty =
            rsra::build_path(&rsra::decompose(&rsra::pad(&s, &s, 0).unwrap()).unwrap()).unwrap();
        assert_eq!(emit(&empty).gadgets.len(), 0);
        assert_eq!(gate_count(&empty), 0);

        let pre = StabilizerCode::parse_text("Z").unwrap();
        let post = StabilizerCode::parse_text("X").unwrap();
        let path = ConversionPath {
            n: 1,
            m: 0,
            ancilla_qubits: vec![],
            source: pre.clone(),
            target: post.clone(),
            steps: vec![ConversionStep {
                measure: "X".parse().unwrap(),
                correct: "Z".parse().unwrap(),
                replaced_index: 0,
            }],
            intermediates: vec![pre, post],
            seed: None,
            retry: None,
        };
        assert_eq!(emit(&path).gadgets[0].cat_size, 1);
    }

    #[test]
    fn count_is_permutation_invariant() {
        let path = table(fixtures::TABLE3);
        let perm: Vec<usize> = (0..path.n).rev().collect();
        let mut moved = path.clone();
        for s in &mut moved.steps {
            s.measure = s.measure.permuted(&perm);
            s.correct = s.correct.permuted(&perm);
        }
        assert_eq!(gate_count(&moved), gate_count(&path));
    }
}
