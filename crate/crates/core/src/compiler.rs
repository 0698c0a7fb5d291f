//! Gate-level synthesis of one QAOA layer and CNOT accounting.
//!
//! A weight-`k` Z-string `c * Z_S` with qubits `s_1 < ... < s_k` becomes the
//! ladder `CX(s_1, s_2) ... CX(s_{k-1}, s_k)`, `RZ(2 gamma c)` on `s_k` and the
//! mirrored ladder, i.e. `2(k - 1)` CNOTs. Conventions:
//! `RZ(t) = exp(-i t Z / 2)`, `RX(t) = exp(-i t X / 2)`, so the layer realises
//! `exp(-i beta sum X) exp(-i gamma H)` up to the global phase of the
//! identity term, which is tracked in [`Circuit::global_phase`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{Model, PauliZExpansion};

/// Largest Z-string weight the synthesizer accepts.
pub const MAX_WEIGHT: u32 = 4;

/// A native gate on 1-based qubit indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Rz { qubit: usize, angle: f64 },
    Rx { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot: usize,
    pub rz: usize,
    pub rx: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    layers: usize,
    model: Option<Model>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
            layers: 0,
            model: None,
            global_phase: 0.0,
        }
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = Some(model);
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn model(&self) -> Option<Model> {
        self.model
    }

    /// Phase `phi` such that the ideal unitary is `exp(i phi)` times the circuit.
    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::Rz { qubit, .. } | Gate::Rx { qubit, .. } => self.check_qubit(qubit)?,
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(Error::InvalidArgument(format!(
                        "CNOT control and target are both qubit {control}"
                    )));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other` (same width) after this circuit.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.layers += other.layers;
        self.global_phase += other.global_phase;
        if self.model.is_none() {
            self.model = other.model;
        }
        Ok(())
    }

    pub fn counts(&self) -> GateCounts {
        self.gates.iter().fold(GateCounts::default(), |mut c, g| {
            match g {
                Gate::Rz { .. } => c.rz += 1,
                Gate::Rx { .. } => c.rx += 1,
                Gate::Cnot { .. } => c.cnot += 1,
            }
            c
        })
    }
}

fn qubits_of(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i as usize + 1)
        .collect()
}

/// One layer: phase separator for `pauli` at angle `gamma`, then
/// `RX(2 beta)` on every qubit.
pub fn synthesize_layer(pauli: &PauliZExpansion, gamma: f64, beta: f64) -> Result<Circuit> {
    let mut circuit = Circuit::new(pauli.num_qubits());
    let mut terms: Vec<(u32, f64)> = pauli.terms().collect();
    terms.sort_by_key(|&(m, _)| (m.count_ones(), m));

    for (mask, c) in terms {
        let weight = mask.count_ones();
        if weight > MAX_WEIGHT {
            return Err(Error::UnsupportedWeight(weight));
        }
        let angle = 2.0 * gamma * c;
        if weight == 0 {
            circuit.global_phase -= gamma * c;
            continue;
        }
        let qs = qubits_of(mask);
        let ladder: Vec<Gate> = qs
            .windows(2)
            .map(|w| Gate::Cnot {
                control: w[0],
                target: w[1],
            })
            .collect();
        for &g in &ladder {
            circuit.push(g)?;
        }
        circuit.push(Gate::Rz {
            qubit: *qs.last().unwrap(),
            angle,
        })?;
        for &g in ladder.iter().rev() {
            circuit.push(g)?;
        }
    }
    for qubit in 1..=circuit.n {
        circuit.push(Gate::Rx {
            qubit,
            angle: 2.0 * beta,
        })?;
    }
    circuit.layers = 1;
    Ok(circuit)
}

/// Full ansatz circuit (without state preparation) for the given angles.
pub fn synthesize_ansatz(
    pauli: &PauliZExpansion,
    gammas: &[f64],
    betas: &[f64],
    model: Model,
) -> Result<Circuit> {
    if gammas.len() != betas.len() {
        return Err(Error::DimensionMismatch {
            expected: gammas.len(),
            got: betas.len(),
        });
    }
    let mut circuit = Circuit::new(pauli.num_qubits()).with_model(model);
    for (&g, &b) in gammas.iter().zip(betas) {
        circuit.append(&synthesize_layer(pauli, g, b)?)?;
    }
    Ok(circuit)
}

/// CNOTs per layer: `2(k - 1)` for every Z-string of weight `k >= 2`.
pub fn cnot_count(pauli: &PauliZExpansion) -> usize {
    pauli
        .terms()
        .map(|(m, _)| m.count_ones() as usize)
        .filter(|&k| k >= 2)
        .map(|k| 2 * (k - 1))
        .sum()
}

/// Serializes `circuit` as OpenQASM 2.0 on a single register `q`.
///
/// Angles are written with 17 significant digits so that parsing them back
/// recovers the exact `f64`.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    if circuit.layers > 0 || circuit.model.is_some() {
        let model = circuit.model.map(Model::as_str).unwrap_or("none");
        let _ = writeln!(
            out,
            "// model: {model}; layers: {}; global phase: {:.16e}",
            circuit.layers, circuit.global_phase
        );
    }
    let _ = writeln!(out, "qreg q[{}];", circuit.n);
    for g in &circuit.gates {
        let _ = match *g {
            Gate::Rz { qubit, angle } => writeln!(out, "rz({angle:.16e}) q[{}];", qubit - 1),
            Gate::Rx { qubit, angle } => writeln!(out, "rx({angle:.16e}) q[{}];", qubit - 1),
            Gate::Cnot { control, target } => {
                writeln!(out, "cx q[{}],q[{}];", control - 1, target - 1)
            }
        };
    }
    out
}
