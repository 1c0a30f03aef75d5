use num_complex::Complex64;

use super::gate::GateOp;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Records that a gate's angle equals `scale * θ[index]` for a trainable
/// parameter vector `θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamBinding {
    pub index: usize,
    pub scale: f64,
}

/// Ordered gate list; `gates[0]` is applied first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<GateOp>,
    bindings: Vec<Option<ParamBinding>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub single_qubit: usize,
    pub cnot: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            bindings: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn bindings(&self) -> &[Option<ParamBinding>] {
        &self.bindings
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        self.bindings.push(None);
        Ok(())
    }

    /// Appends a rotation whose angle is tied to a trainable parameter.
    pub fn push_bound(&mut self, gate: GateOp, binding: ParamBinding) -> Result<()> {
        if gate.generator().is_none() {
            return Err(Error::InvalidParams(format!(
                "{gate} has no angle to bind"
            )));
        }
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        self.bindings.push(Some(binding));
        Ok(())
    }

    /// Gate-by-gate inverse: reversed order, negated angles and bindings.
    pub fn inverse(&self) -> Circuit {
        let gates = self.gates.iter().rev().map(|g| g.inverse()).collect();
        let bindings = self
            .bindings
            .iter()
            .rev()
            .map(|b| {
                b.map(|b| ParamBinding {
                    index: b.index,
                    scale: -b.scale,
                })
            })
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            gates,
            bindings,
        }
    }

    /// `self` followed by `other`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::QubitCountMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.bindings.extend_from_slice(&other.bindings);
        Ok(())
    }

    pub fn gate_counts(&self) -> GateCounts {
        let cnot = self.gates.iter().filter(|g| !g.is_single_qubit()).count();
        GateCounts {
            single_qubit: self.gates.len() - cnot,
            cnot,
        }
    }

    /// Copy with gate `position` rotated by an extra `shift` radians.
    pub(crate) fn with_shifted_gate(&self, position: usize, shift: f64) -> Circuit {
        let mut out = self.clone();
        let g = out.gates[position];
        if let Some(a) = g.angle() {
            out.gates[position] = g.with_angle(a + shift);
        }
        out
    }

    /// Number of trainable parameters referenced (max bound index + 1).
    pub fn num_bound_params(&self) -> usize {
        self.bindings
            .iter()
            .flatten()
            .map(|b| b.index + 1)
            .max()
            .unwrap_or(0)
    }
}

/// Applies every gate of `circuit` to `initial` in order.
pub fn run_circuit(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if circuit.num_qubits != initial.num_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: circuit.num_qubits,
            found: initial.num_qubits(),
        });
    }
    let mut state = initial.clone();
    for g in &circuit.gates {
        state.apply_unchecked(g);
    }
    Ok(state)
}

/// Final state from `|0…0⟩` together with its derivatives with respect to
/// each of `num_params` bound parameters (forward-mode differentiation).
pub fn run_with_tangents(
    circuit: &Circuit,
    num_params: usize,
) -> Result<(StateVector, Vec<StateVector>)> {
    let n = circuit.num_qubits;
    let mut state = StateVector::zero(n)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut tangents = vec![
        StateVector::from_amplitudes(vec![zero; 1 << n])?;
        num_params
    ];
    let mut scratch = state.clone();
    for (g, binding) in circuit.gates.iter().zip(&circuit.bindings) {
        state.apply_unchecked(g);
        for t in tangents.iter_mut() {
            t.apply_unchecked(g);
        }
        if let Some(b) = binding {
            if b.index >= num_params {
                return Err(Error::InvalidParams(format!(
                    "binding to parameter {} but only {num_params} tracked",
                    b.index
                )));
            }
            // d/dφ R_P(φ) = -i/2 · P · R_P(φ)
            let pauli = g.generator().expect("bound gates are rotations");
            scratch.clone_from(&state);
            scratch.apply_pauli_scaled(g.target(), pauli, Complex64::new(0.0, -0.5 * b.scale));
            tangents[b.index].axpy(Complex64::new(1.0, 0.0), &scratch);
        }
    }
    Ok((state, tangents))
}
