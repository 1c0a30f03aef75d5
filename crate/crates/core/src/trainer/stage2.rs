use nalgebra::{DMatrix, DVector};

use super::qp::{solve_nonneg_qp, QpOptions};
use super::{TrainConfig, WeightVector};
use crate::alignment::{frobenius_inner, knn_by_kernel, NeighborSets, TargetKernel};
use crate::error::{Error, Result};
use crate::kernel::{combine_kernels, KernelMatrix};

/// Outcome of the weight optimization.
#[derive(Clone, Debug)]
pub struct Stage2Result {
    pub weights: WeightVector,
    /// HTA of the combined kernel at the start of each iteration.
    pub trace: Vec<f64>,
    /// HTA at the returned weights, the best over all iterates.
    pub final_hta: f64,
    pub kernel: KernelMatrix,
    pub neighbors: NeighborSets,
    pub converged: bool,
}

impl Stage2Result {
    pub fn eta(&self) -> &[f64] {
        self.weights.eta()
    }
}

fn check_kernels(kernels: &[KernelMatrix]) -> Result<usize> {
    let first = kernels.first().ok_or(Error::EmptyInput)?;
    if !first.is_square() {
        return Err(Error::ShapeMismatch {
            left: first.shape(),
            right: (first.nrows(), first.nrows()),
        });
    }
    for k in kernels {
        if k.shape() != first.shape() {
            return Err(Error::ShapeMismatch {
                left: first.shape(),
                right: k.shape(),
            });
        }
    }
    Ok(first.nrows())
}

/// `𝓜_qr = ⟨K^q, K^r⟩_F`.
pub fn global_gram(kernels: &[KernelMatrix]) -> Result<DMatrix<f64>> {
    check_kernels(kernels)?;
    let m = kernels.len();
    let mut g = DMatrix::zeros(m, m);
    for q in 0..m {
        for r in q..m {
            let v = frobenius_inner(&kernels[q], &kernels[r])?;
            g[(q, r)] = v;
            g[(r, q)] = v;
        }
    }
    Ok(g)
}

/// `𝓜^i_qr = ⟨K^q_i, K^r_i⟩_F` over each neighbourhood restriction.
pub fn local_grams(kernels: &[KernelMatrix], neighbors: &NeighborSets) -> Result<Vec<DMatrix<f64>>> {
    let n = check_kernels(kernels)?;
    if neighbors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: neighbors.len(),
        });
    }
    neighbors
        .iter()
        .map(|nb| {
            let subs: Vec<KernelMatrix> = kernels.iter().map(|k| k.submatrix(nb)).collect();
            global_gram(&subs)
        })
        .collect()
}

fn quad(g: &DMatrix<f64>, eta: &[f64]) -> f64 {
    let v = DVector::from_column_slice(eta);
    (v.transpose() * g * &v)[(0, 0)]
}

/// `τ_i = ηᵀ𝓜^iη / ηᵀ𝓜η`.
pub fn compute_tau(eta: &[f64], local: &[DMatrix<f64>], global: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = global.nrows();
    if eta.len() != m {
        return Err(Error::WeightCount {
            expected: m,
            found: eta.len(),
        });
    }
    let denom = quad(global, eta);
    if !(denom > 0.0) {
        return Err(Error::DegenerateKernels { value: denom });
    }
    local
        .iter()
        .map(|g| {
            let t = quad(g, eta) / denom;
            if t > 0.0 {
                Ok(t)
            } else {
                Err(Error::DegenerateKernels { value: t })
            }
        })
        .collect()
}

/// `a_q = 1/(Nk) Σ_i ⟨K^q_i, K*_i⟩_F / √τ_i` and `b_q = ⟨K^q, K*⟩_F / N`.
pub fn compute_linear_terms(
    kernels: &[KernelMatrix],
    target: &TargetKernel,
    neighbors: &NeighborSets,
    tau: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = check_kernels(kernels)?;
    if target.len() != n || neighbors.len() != n || tau.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if target.len() != n {
                target.len()
            } else if neighbors.len() != n {
                neighbors.len()
            } else {
                tau.len()
            },
        });
    }
    if let Some(&t) = tau.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::DegenerateKernels { value: t });
    }
    let k = neighbors.k() as f64;
    let mut a = vec![0.0; kernels.len()];
    let mut b = vec![0.0; kernels.len()];
    for (q, kq) in kernels.iter().enumerate() {
        let mut sum = 0.0;
        for (i, nb) in neighbors.iter().enumerate() {
            let mut inner = 0.0;
            for &r in nb {
                for &c in nb {
                    inner += kq.get(r, c) * target.y(r) * target.y(c);
                }
            }
            sum += inner / tau[i].sqrt();
        }
        a[q] = sum / (n as f64 * k);
        let mut inner = 0.0;
        for r in 0..n {
            for c in 0..n {
                inner += kq.get(r, c) * target.y(r) * target.y(c);
            }
        }
        b[q] = inner / n as f64;
    }
    Ok((a, b))
}

/// HTA of `Σ η_m K^m` written through the Gram quantities:
/// `ηᵀ((1-λ)a + λb) / √(ηᵀ𝓜η)` with `τ` taken at `η`.
pub fn stage2_objective(
    kernels: &[KernelMatrix],
    target: &TargetKernel,
    neighbors: &NeighborSets,
    eta: &[f64],
    lambda: f64,
) -> Result<f64> {
    let global = global_gram(kernels)?;
    let local = local_grams(kernels, neighbors)?;
    let tau = compute_tau(eta, &local, &global)?;
    let (a, b) = compute_linear_terms(kernels, target, neighbors, &tau)?;
    Ok(objective_from_terms(eta, &a, &b, &global, lambda))
}

/// Alternates neighbourhood rebuilds, QP solves for `η`, and `τ` updates.
pub fn train_weights(
    kernels: &[KernelMatrix],
    labels: &[i8],
    initial: &WeightVector,
    config: &TrainConfig,
) -> Result<Stage2Result> {
    let n = check_kernels(kernels)?;
    config.validate_for(n)?;
    let target = TargetKernel::new(labels)?;
    if target.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.len(),
        });
    }
    if initial.len() != kernels.len() {
        return Err(Error::WeightCount {
            expected: kernels.len(),
            found: initial.len(),
        });
    }
    let global = global_gram(kernels)?;
    let lambda = config.lambda;
    let options = QpOptions::default();

    let mut weights = initial.clone();
    let mut trace = Vec::new();
    let mut converged = false;
    // The alternation is a fixed-point scheme without an ascent guarantee,
    // so the best iterate seen is the one returned.
    let mut best: Option<(f64, WeightVector)> = None;

    if kernels.len() == 1 {
        weights = WeightVector::from_mu(vec![1.0])?;
    } else {
        for _ in 0..config.t2 {
            let combined = combine_kernels(kernels, weights.eta())?;
            let neighbors = knn_by_kernel(&combined, config.k2, config.anchor_policy)?;
            let local = local_grams(kernels, &neighbors)?;
            let tau = compute_tau(weights.eta(), &local, &global)?;
            let (a, b) = compute_linear_terms(kernels, &target, &neighbors, &tau)?;
            let hta = objective_from_terms(weights.eta(), &a, &b, &global, lambda);
            let previous = trace.last().copied().unwrap_or(0.0);
            trace.push(hta);
            if best.as_ref().map_or(true, |(h, _)| hta > *h) {
                best = Some((hta, weights.clone()));
            }

            let mu = solve_nonneg_qp(&global, &a, &b, lambda, &options)?;
            let mut next = WeightVector::from_mu(mu)?;
            next.set_tau(compute_tau(next.eta(), &local, &global)?);
            weights = next;
            if (hta - previous).abs() <= config.eps2 {
                converged = true;
                break;
            }
        }
    }

    let kernel = combine_kernels(kernels, weights.eta())?;
    let neighbors = knn_by_kernel(&kernel, config.k2, config.anchor_policy)?;
    let last_hta = stage2_objective(kernels, &target, &neighbors, weights.eta(), lambda)?;
    let (final_hta, weights, kernel, neighbors) = match best {
        Some((h, w)) if h > last_hta => {
            let k = combine_kernels(kernels, w.eta())?;
            let nb = knn_by_kernel(&k, config.k2, config.anchor_policy)?;
            (h, w, k, nb)
        }
        _ => (last_hta, weights, kernel, neighbors),
    };
    let mut weights = weights;
    weights.set_tau(compute_tau(weights.eta(), &local_grams(kernels, &neighbors)?, &global)?);
    if kernels.len() == 1 {
        trace.push(final_hta);
        converged = true;
    }
    Ok(Stage2Result {
        weights,
        trace,
        final_hta,
        kernel,
        neighbors,
        converged,
    })
}

fn objective_from_terms(eta: &[f64], a: &[f64], b: &[f64], global: &DMatrix<f64>, lambda: f64) -> f64 {
    let lin: f64 = eta
        .iter()
        .zip(a.iter().zip(b))
        .map(|(e, (a, b))| e * ((1.0 - lambda) * a + lambda * b))
        .sum();
    lin / quad(global, eta).sqrt()
}
