use std::fmt;

use crate::error::{Error, Result};

/// A gate from the ansatz gate set. Rotation angles are in radians with the
/// convention `R_P(θ) = exp(-i θ P / 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    H(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cnot { control: usize, target: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl GateOp {
    pub fn target(&self) -> usize {
        match *self {
            GateOp::H(q) | GateOp::Rx(q, _) | GateOp::Ry(q, _) | GateOp::Rz(q, _) => q,
            GateOp::Cnot { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            GateOp::Cnot { control, .. } => Some(control),
            _ => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateOp::Rx(_, a) | GateOp::Ry(_, a) | GateOp::Rz(_, a) => Some(a),
            _ => None,
        }
    }

    /// Generator of a rotation gate; `None` for H and CNOT.
    pub fn generator(&self) -> Option<Pauli> {
        match self {
            GateOp::Rx(..) => Some(Pauli::X),
            GateOp::Ry(..) => Some(Pauli::Y),
            GateOp::Rz(..) => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        !matches!(self, GateOp::Cnot { .. })
    }

    /// Same gate with its rotation angle replaced. Non-rotations are returned
    /// unchanged.
    pub fn with_angle(self, angle: f64) -> GateOp {
        match self {
            GateOp::Rx(q, _) => GateOp::Rx(q, angle),
            GateOp::Ry(q, _) => GateOp::Ry(q, angle),
            GateOp::Rz(q, _) => GateOp::Rz(q, angle),
            other => other,
        }
    }

    /// Exact inverse: rotations negate their angle, H and CNOT are involutions.
    pub fn inverse(self) -> GateOp {
        match self.angle() {
            Some(a) => self.with_angle(-a),
            None => self,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= num_qubits {
                Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                })
            } else {
                Ok(())
            }
        };
        check(self.target())?;
        if let Some(c) = self.control() {
            check(c)?;
            if c == self.target() {
                return Err(Error::ControlEqualsTarget(c));
            }
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(Error::InvalidParams(format!("non-finite angle {a}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::H(q) => write!(f, "H({q})"),
            GateOp::Rx(q, a) => write!(f, "RX({a})({q})"),
            GateOp::Ry(q, a) => write!(f, "RY({a})({q})"),
            GateOp::Rz(q, a) => write!(f, "RZ({a})({q})"),
            GateOp::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
        }
    }
}
