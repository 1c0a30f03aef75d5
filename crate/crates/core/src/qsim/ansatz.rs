//! The layered data-encoding ansatz `W(x, θ)`.
//!
//! Application order: a Hadamard on every qubit, then `P` layers of
//!
//! 1. `RY(x_q)` on each qubit `q` (data encoding),
//! 2. for each neighbouring pair on an open chain, `CNOT(q, q+1) · RZ(γ_p)_{q+1} · CNOT(q, q+1)`,
//! 3. `RX(2 β_p)` on each qubit.
//!
//! The parameter vector is laid out as `(β_1, …, β_P, γ_1, …, γ_P)`.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, GateCounts, ParamBinding};
use super::gate::GateOp;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl AnsatzParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidParams("depth must be at least 1".into()));
        }
        if betas.len() != gammas.len() {
            return Err(Error::InvalidParams(format!(
                "{} betas but {} gammas",
                betas.len(),
                gammas.len()
            )));
        }
        if betas.iter().chain(&gammas).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        Ok(Self { betas, gammas })
    }

    /// All-zero parameters of the given depth.
    pub fn zeros(depth: usize) -> Result<Self> {
        Self::new(vec![0.0; depth], vec![0.0; depth])
    }

    /// Parameters drawn uniformly from `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(depth: usize, rng: &mut R) -> Result<Self> {
        let mut draw = || (0..depth).map(|_| rng.gen_range(0.0..TAU)).collect::<Vec<_>>();
        let betas = draw();
        let gammas = draw();
        Self::new(betas, gammas)
    }

    /// Inverse of [`AnsatzParams::to_vec`].
    pub fn from_slice(theta: &[f64]) -> Result<Self> {
        if theta.len() % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "parameter vector of odd length {}",
                theta.len()
            )));
        }
        let (b, g) = theta.split_at(theta.len() / 2);
        Self::new(b.to_vec(), g.to_vec())
    }

    pub fn depth(&self) -> usize {
        self.betas.len()
    }

    pub fn num_params(&self) -> usize {
        2 * self.depth()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// `(β_1, …, β_P, γ_1, …, γ_P)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.betas.iter().chain(&self.gammas).copied().collect()
    }

    pub fn beta_index(&self, layer: usize) -> usize {
        layer
    }

    pub fn gamma_index(&self, layer: usize) -> usize {
        self.depth() + layer
    }
}

/// Builds `W(x, θ)` for a feature vector `x` (one qubit per feature).
pub fn build_ansatz_circuit(x: &[f64], params: &AnsatzParams) -> Result<Circuit> {
    let d = x.len();
    if d == 0 {
        return Err(Error::EmptyFeatureVector);
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParams(format!("non-finite feature {bad}")));
    }
    if d > super::MAX_QUBITS {
        return Err(Error::TooManyQubits(d));
    }
    let mut c = Circuit::new(d);
    for q in 0..d {
        c.push(GateOp::H(q))?;
    }
    for p in 0..params.depth() {
        for (q, &xq) in x.iter().enumerate() {
            c.push(GateOp::Ry(q, xq))?;
        }
        let gamma = params.gammas[p];
        let gamma_binding = ParamBinding {
            index: params.gamma_index(p),
            scale: 1.0,
        };
        for q in 0..d.saturating_sub(1) {
            let cnot = GateOp::Cnot {
                control: q,
                target: q + 1,
            };
            c.push(cnot)?;
            c.push_bound(GateOp::Rz(q + 1, gamma), gamma_binding)?;
            c.push(cnot)?;
        }
        let beta = params.betas[p];
        let beta_binding = ParamBinding {
            index: params.beta_index(p),
            scale: 2.0,
        };
        for q in 0..d {
            c.push_bound(GateOp::Rx(q, 2.0 * beta), beta_binding)?;
        }
    }
    Ok(c)
}

/// Compute-uncompute circuit `W(x_j, θ)† W(x_i, θ)`; its all-zeros
/// probability is the kernel value.
pub fn build_overlap_circuit(xi: &[f64], xj: &[f64], params: &AnsatzParams) -> Result<Circuit> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            found: xj.len(),
        });
    }
    let mut c = build_ansatz_circuit(xi, params)?;
    c.extend(&build_ansatz_circuit(xj, params)?.inverse())?;
    Ok(c)
}

/// Exact gate counts of `W(x, θ)` for `d` features and depth `P`.
pub fn ansatz_gate_counts(d: usize, depth: usize) -> GateCounts {
    GateCounts {
        single_qubit: d + depth * (2 * d + d.saturating_sub(1)),
        cnot: 2 * depth * d.saturating_sub(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_single_layer() {
        let p = AnsatzParams::new(vec![0.1], vec![0.5]).unwrap();
        let c = build_ansatz_circuit(&[0.3], &p).unwrap();
        assert_eq!(
            c.gates(),
            &[GateOp::H(0), GateOp::Ry(0, 0.3), GateOp::Rx(0, 0.2)]
        );
    }

    #[test]
    fn two_qubit_single_layer_sequence() {
        let p = AnsatzParams::new(vec![0.1], vec![0.5]).unwrap();
        let c = build_ansatz_circuit(&[0.3, 0.7], &p).unwrap();
        let cn = GateOp::Cnot { control: 0, target: 1 };
        assert_eq!(
            c.gates(),
            &[
                GateOp::H(0),
                GateOp::H(1),
                GateOp::Ry(0, 0.3),
                GateOp::Ry(1, 0.7),
                cn,
                GateOp::Rz(1, 0.5),
                cn,
                GateOp::Rx(0, 0.2),
                GateOp::Rx(1, 0.2),
            ]
        );
        assert_eq!(c.gate_counts(), GateCounts { single_qubit: 7, cnot: 2 });
    }

    #[test]
    fn full_scale_counts() {
        let p = AnsatzParams::zeros(6).unwrap();
        let c = build_ansatz_circuit(&[0.0; 6], &p).unwrap();
        assert_eq!(c.gate_counts(), GateCounts { single_qubit: 108, cnot: 60 });
    }

    #[test]
    fn overlap_structure() {
        let p = AnsatzParams::new(vec![0.1], vec![0.5]).unwrap();
        let c = build_overlap_circuit(&[0.3], &[0.9], &p).unwrap();
        assert_eq!(c.len(), 6);

        let c = build_overlap_circuit(&[0.3, 0.7], &[0.2, 0.4], &p).unwrap();
        let second_half = &c.gates()[9..];
        assert_eq!(second_half[0], GateOp::Rx(1, -0.2));
        assert_eq!(*second_half.last().unwrap(), GateOp::H(0));
    }

    #[test]
    fn builder_errors() {
        let p = AnsatzParams::zeros(1).unwrap();
        assert!(matches!(
            build_ansatz_circuit(&[], &p),
            Err(Error::EmptyFeatureVector)
        ));
        assert!(AnsatzParams::zeros(0).is_err());
        assert!(AnsatzParams::new(vec![0.0], vec![]).is_err());
        assert!(matches!(
            build_overlap_circuit(&[0.1], &[0.1, 0.2], &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn param_vector_roundtrip() {
        let p = AnsatzParams::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(p.to_vec(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(AnsatzParams::from_slice(&p.to_vec()).unwrap(), p);
    }
}
