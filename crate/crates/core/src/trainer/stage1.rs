use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TrainConfig;
use crate::alignment::{hta_gradient, hybrid_alignment, knn_by_distance, TargetKernel};
use crate::error::{Error, Result};
use crate::kernel::{quantum_kernel_with_gradients, KernelMatrix};
use crate::qsim::AnsatzParams;

/// Outcome of training one view's circuit parameters.
#[derive(Clone, Debug)]
pub struct Stage1View {
    pub initial_params: AnsatzParams,
    pub params: AnsatzParams,
    /// Full-batch HTA before each update, one entry per iteration.
    pub trace: Vec<f64>,
    /// Parameters at the start of each iteration.
    pub param_trace: Vec<Vec<f64>>,
    /// Full-batch HTA at the returned parameters.
    pub final_hta: f64,
    pub kernel: KernelMatrix,
    pub converged: bool,
}

impl Stage1View {
    pub fn initial_hta(&self) -> f64 {
        self.trace.first().copied().unwrap_or(self.final_hta)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Per-view Stage-1 outcomes, in view order.
#[derive(Clone, Debug)]
pub struct Stage1Result {
    pub names: Vec<String>,
    pub views: Vec<Stage1View>,
}

/// Gradient ascent on the hybrid alignment of one view's quantum kernel.
///
/// Neighbourhoods are built once from Euclidean distances. With
/// `batch_size > 0` each step draws that many distinct anchors; the
/// recorded HTA is always full batch. `stream` separates the random
/// streams of views trained under the same seed.
pub fn train_base_kernel<R: AsRef<[f64]>>(
    x: &[R],
    labels: &[i8],
    initial: &AnsatzParams,
    config: &TrainConfig,
    stream: u64,
) -> Result<Stage1View> {
    let n = x.len();
    config.validate_for(n)?;
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let target = TargetKernel::new(labels)?;
    let neighbors = knn_by_distance(x, config.k1, config.anchor_policy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);

    let mut theta = initial.to_vec();
    let mut trace = Vec::new();
    let mut param_trace = Vec::new();
    let mut converged = false;
    let all: Vec<usize> = (0..n).collect();

    for iteration in 1..=config.t1 {
        let params = AnsatzParams::from_slice(&theta)?;
        let (kernel, grads) = quantum_kernel_with_gradients(x, &params)?;
        let hta = hybrid_alignment(&kernel, &target, &neighbors, config.lambda)?;
        let previous = trace.last().copied().unwrap_or(0.0);
        trace.push(hta);
        param_trace.push(theta.clone());

        let anchors = if config.batch_size == 0 || config.batch_size >= n {
            all.clone()
        } else {
            let mut a = rand::seq::index::sample(&mut rng, n, config.batch_size).into_vec();
            a.sort_unstable();
            a
        };
        let g = hta_gradient(&kernel, &grads, &target, &neighbors, &anchors, config.lambda)?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { iteration });
        }
        for (t, gv) in theta.iter_mut().zip(&g) {
            *t += config.learning_rate * gv;
        }
        if (hta - previous).abs() <= config.eps1 {
            converged = true;
            break;
        }
    }

    log::debug!(
        "stage 1: {} iterations, HTA {:.6} -> {:.6}",
        trace.len(),
        trace[0],
        trace[trace.len() - 1]
    );
    let params = AnsatzParams::from_slice(&theta)?;
    let (kernel, _) = quantum_kernel_with_gradients(x, &params)?;
    let final_hta = hybrid_alignment(&kernel, &target, &neighbors, config.lambda)?;
    Ok(Stage1View {
        initial_params: initial.clone(),
        params,
        trace,
        param_trace,
        final_hta,
        kernel,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<Vec<f64>>, Vec<i8>) {
        let x = vec![
            vec![0.1, 0.3],
            vec![0.4, 0.2],
            vec![0.2, 0.5],
            vec![0.5, 0.6],
            vec![2.6, 2.9],
            vec![2.9, 2.4],
            vec![2.5, 2.7],
            vec![3.0, 2.8],
        ];
        (x, vec![-1, -1, -1, -1, 1, 1, 1, 1])
    }

    fn cfg() -> TrainConfig {
        TrainConfig {
            k1: 3,
            k2: 3,
            batch_size: 0,
            ..Default::default()
        }
    }

    #[test]
    fn infinite_threshold_stops_after_one() {
        let (x, y) = toy();
        let p = AnsatzParams::new(vec![0.3], vec![1.1]).unwrap();
        let c = TrainConfig { eps1: f64::INFINITY, ..cfg() };
        let r = train_base_kernel(&x, &y, &p, &c, 0).unwrap();
        assert_eq!(r.iterations(), 1);
        assert!(r.converged);
    }

    #[test]
    fn zero_rate_keeps_params() {
        let (x, y) = toy();
        let p = AnsatzParams::new(vec![0.3], vec![1.1]).unwrap();
        let c = TrainConfig { learning_rate: 0.0, eps1: 0.0, t1: 5, ..cfg() };
        let r = train_base_kernel(&x, &y, &p, &c, 0).unwrap();
        assert_eq!(r.params, p);
        // The second iteration sees ΔHTA = 0 and stops.
        assert_eq!(r.iterations(), 2);
        assert!(r.trace.iter().all(|&h| h == r.trace[0]));
        assert_eq!(r.final_hta, r.trace[0]);
    }

    #[test]
    fn label_count_checked() {
        let (x, _) = toy();
        let p = AnsatzParams::zeros(1).unwrap();
        assert!(train_base_kernel(&x, &[1, -1], &p, &cfg(), 0).is_err());
    }
}
