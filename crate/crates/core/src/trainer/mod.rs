//! Two-stage training: per-view circuit parameters by hybrid-alignment
//! gradient ascent, then simplex combination weights by alternating a
//! non-negative QP with neighbourhood and normalizer updates.

mod checkpoint;
mod qp;
mod stage1;
mod stage2;

pub use checkpoint::{parse_checkpoint, resume_params, CheckpointRecord};
pub use qp::{qp_kkt_violation, qp_objective, solve_nonneg_qp, QpOptions, MU_FLOOR};
pub use stage1::{train_base_kernel, Stage1Result, Stage1View};
pub use stage2::{
    compute_linear_terms, compute_tau, global_gram, local_grams, stage2_objective, train_weights,
    Stage2Result,
};

use serde::{Deserialize, Serialize};

use crate::alignment::AnchorPolicy;
use crate::error::{Error, Result};

/// Lower bound applied to every combination weight.
pub const ETA_FLOOR: f64 = 1e-8;

/// Hyperparameters shared by both training stages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    pub k1: usize,
    pub k2: usize,
    pub learning_rate: f64,
    pub t1: usize,
    pub t2: usize,
    pub eps1: f64,
    pub eps2: f64,
    /// Stage-1 anchors sampled per step; 0 means full batch.
    pub batch_size: usize,
    pub seed: u64,
    pub anchor_policy: AnchorPolicy,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.125,
            k1: 8,
            k2: 8,
            learning_rate: 2.0,
            t1: 50,
            t2: 20,
            eps1: 1e-4,
            eps2: 1e-4,
            batch_size: 16,
            seed: 0,
            anchor_policy: AnchorPolicy::Include,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad(format!("lambda {} outside [0, 1]", self.lambda));
        }
        // ξ = 0 freezes the circuit parameters; only negative or NaN rates are rejected.
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {} must be non-negative", self.learning_rate));
        }
        if self.t1 == 0 || self.t2 == 0 {
            return bad("iteration caps must be at least 1".into());
        }
        if self.eps1.is_nan() || self.eps1 < 0.0 || self.eps2.is_nan() || self.eps2 < 0.0 {
            return bad("convergence thresholds must be non-negative".into());
        }
        if self.k1 < 2 || self.k2 < 2 {
            return bad(format!("neighbor counts k1 = {}, k2 = {} must be >= 2", self.k1, self.k2));
        }
        Ok(())
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        for k in [self.k1, self.k2] {
            if k > n {
                return Err(Error::NeighborCount { k, n });
            }
        }
        Ok(())
    }
}

/// Simplex weights `η`, the unnormalized QP solution `μ`, and the
/// per-instance normalizer ratios `τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    eta: Vec<f64>,
    mu: Vec<f64>,
    tau: Vec<f64>,
}

impl WeightVector {
    /// `η = 1/M`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            eta: vec![1.0 / m as f64; m],
            mu: vec![1.0; m],
            tau: Vec::new(),
        })
    }

    /// Normalizes `μ` onto the simplex after flooring each entry at
    /// [`ETA_FLOOR`] relative to the total.
    pub fn from_mu(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::EmptyInput);
        }
        if mu.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParams(format!("invalid weights {mu:?}")));
        }
        let total: f64 = mu.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParams("weights sum to zero".into()));
        }
        let mut eta: Vec<f64> = mu.iter().map(|v| (v / total).max(ETA_FLOOR)).collect();
        let s: f64 = eta.iter().sum();
        eta.iter_mut().for_each(|v| *v /= s);
        Ok(Self {
            eta,
            mu,
            tau: Vec::new(),
        })
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub(crate) fn set_tau(&mut self, tau: Vec<f64>) {
        self.tau = tau;
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_mu_normalizes_and_floors() {
        let w = WeightVector::from_mu(vec![3.0, 1.0, 0.0]).unwrap();
        let s: f64 = w.eta().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(w.eta()[2] >= ETA_FLOOR * 0.999);
        assert!((w.eta()[0] / w.eta()[1] - 3.0).abs() < 1e-6);
        assert!(WeightVector::from_mu(vec![0.0, 0.0]).is_err());
        assert!(WeightVector::from_mu(vec![-1.0, 2.0]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let c = TrainConfig { lambda: 1.5, ..Default::default() };
        assert!(c.validate().is_err());
        let c = TrainConfig { k1: 1, ..Default::default() };
        assert!(c.validate().is_err());
        let c = TrainConfig { t2: 0, ..Default::default() };
        assert!(c.validate().is_err());
        assert!(TrainConfig::default().validate_for(5).is_err());
    }
}
