use num_complex::Complex64;

use super::gate::{GateOp, Pauli};
use super::MAX_QUBITS;
use crate::error::{Error, Result};

/// Dense pure state over `num_qubits` qubits.
///
/// Basis index `b` has qubit `q` in state `(b >> q) & 1`, i.e. qubit 0 is the
/// least significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero(num_qubits)?;
        if index >= state.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: state.amplitudes.len(),
                found: index,
            });
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalization is applied.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(1),
                found: len,
            });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability of measuring every qubit in `|0⟩`, clamped to `[0, 1]`.
    pub fn zero_probability(&self) -> f64 {
        self.amplitudes[0].norm_sqr().clamp(0.0, 1.0)
    }

    pub(crate) fn check_gate(&self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_qubits)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        self.check_gate(gate)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &GateOp) {
        match *gate {
            GateOp::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                self.for_each_pair(q, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * s;
                    *b = (x - y) * s;
                });
            }
            GateOp::Rx(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                let mis = Complex64::new(0.0, -s);
                self.for_each_pair(q, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = x * c + y * mis;
                    *b = x * mis + y * c;
                });
            }
            GateOp::Ry(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                self.for_each_pair(q, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = x * c - y * s;
                    *b = x * s + y * c;
                });
            }
            GateOp::Rz(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                let lo = Complex64::new(c, -s);
                let hi = Complex64::new(c, s);
                self.for_each_pair(q, |a, b| {
                    *a *= lo;
                    *b *= hi;
                });
            }
            GateOp::Cnot { control, target } => {
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
        }
    }

    /// Multiplies by a single-qubit Pauli on qubit `q`, then by `factor`.
    pub(crate) fn apply_pauli_scaled(&mut self, q: usize, pauli: Pauli, factor: Complex64) {
        let i = Complex64::new(0.0, 1.0);
        match pauli {
            Pauli::X => self.for_each_pair(q, |a, b| {
                std::mem::swap(a, b);
                *a *= factor;
                *b *= factor;
            }),
            Pauli::Y => self.for_each_pair(q, |a, b| {
                let (x, y) = (*a, *b);
                *a = -i * y * factor;
                *b = i * x * factor;
            }),
            Pauli::Z => self.for_each_pair(q, |a, b| {
                *a *= factor;
                *b *= -factor;
            }),
        }
    }

    pub(crate) fn axpy(&mut self, alpha: Complex64, other: &StateVector) {
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += alpha * b;
        }
    }

    /// Visits amplitude pairs `(|…0_q…⟩, |…1_q…⟩)`.
    #[inline]
    fn for_each_pair(&mut self, q: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let stride = 1usize << q;
        for chunk in self.amplitudes.chunks_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                f(a, b);
            }
        }
    }
}

/// Pure-function form of [`StateVector::apply`].
pub fn apply_gate(state: &StateVector, gate: &GateOp) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Squared magnitude of the all-zeros amplitude.
pub fn zero_probability(state: &StateVector) -> f64 {
    state.zero_probability()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: Complex64, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-12 && (a.im - im).abs() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate(&StateVector::zero(1).unwrap(), &GateOp::H(0)).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(s.amplitudes()[1], FRAC_1_SQRT_2, 0.0));
        assert!((zero_probability(&s) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ry_pi_flips() {
        let s = apply_gate(&StateVector::zero(1).unwrap(), &GateOp::Ry(0, PI)).unwrap();
        assert!(close(s.amplitudes()[0], 0.0, 0.0));
        assert!(close(s.amplitudes()[1], 1.0, 0.0));
        assert!(zero_probability(&s) < 1e-24);
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩ in qubit order (q0, q1) = basis index 1.
        let s = StateVector::basis(2, 0b01).unwrap();
        let out = apply_gate(&s, &GateOp::Cnot { control: 0, target: 1 }).unwrap();
        assert!(close(out.amplitudes()[0b11], 1.0, 0.0));
        let s = StateVector::basis(2, 0b10).unwrap();
        let out = apply_gate(&s, &GateOp::Cnot { control: 0, target: 1 }).unwrap();
        assert!(close(out.amplitudes()[0b10], 1.0, 0.0));
    }

    #[test]
    fn rz_and_rx_phases() {
        let s = apply_gate(&StateVector::zero(1).unwrap(), &GateOp::Rz(0, PI)).unwrap();
        assert!(close(s.amplitudes()[0], 0.0, -1.0));
        let s = apply_gate(&StateVector::zero(1).unwrap(), &GateOp::Rx(0, PI)).unwrap();
        assert!(close(s.amplitudes()[1], 0.0, -1.0));
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            apply_gate(&s, &GateOp::H(2)),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
        assert!(matches!(
            apply_gate(&s, &GateOp::Cnot { control: 1, target: 1 }),
            Err(Error::ControlEqualsTarget(1))
        ));
        assert!(StateVector::zero(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn zero_probability_of_zero_state() {
        assert_eq!(zero_probability(&StateVector::zero(3).unwrap()), 1.0);
    }
}
