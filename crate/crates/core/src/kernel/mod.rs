//! Base kernels (quantum and Gaussian), their gradients, and linear
//! multi-kernel combination.

mod gaussian;
mod matrix;
mod quantum;

pub use gaussian::{gaussian_cross_kernel, gaussian_kernel_matrix, mean_pairwise_distance};
pub use matrix::KernelMatrix;
pub use quantum::{
    cross_kernel_matrix, parameter_shift_gradient, quantum_kernel_gradient, quantum_kernel_matrix,
    quantum_kernel_matrix_with, quantum_kernel_value, quantum_kernel_with_gradients,
    EncodedSample, Evaluation, KernelGradients,
};

use crate::error::{Error, Result};
use crate::qsim::AnsatzParams;

/// `Σ_m w_m K^m`, entrywise.
pub fn combine_kernels(kernels: &[KernelMatrix], weights: &[f64]) -> Result<KernelMatrix> {
    let first = kernels.first().ok_or(Error::EmptyInput)?;
    if weights.len() != kernels.len() {
        return Err(Error::WeightCount {
            expected: kernels.len(),
            found: weights.len(),
        });
    }
    let mut acc = first.as_matrix() * weights[0];
    for (k, &w) in kernels.iter().zip(weights).skip(1) {
        if k.shape() != first.shape() {
            return Err(Error::ShapeMismatch {
                left: first.shape(),
                right: k.shape(),
            });
        }
        acc += k.as_matrix() * w;
    }
    Ok(KernelMatrix::from_matrix(acc))
}

/// One view's kernel and how it was produced.
#[derive(Clone, Debug)]
pub struct ViewKernel {
    pub name: String,
    pub dim: usize,
    pub params: Option<AnsatzParams>,
    pub matrix: KernelMatrix,
}

/// Per-view kernels over a common set of `N` samples.
#[derive(Clone, Debug)]
pub struct ViewKernelSet {
    views: Vec<ViewKernel>,
}

impl ViewKernelSet {
    pub fn new(views: Vec<ViewKernel>) -> Result<Self> {
        let first = views.first().ok_or(Error::EmptyInput)?;
        let shape = first.matrix.shape();
        for v in &views[1..] {
            if v.matrix.shape() != shape {
                return Err(Error::ShapeMismatch {
                    left: shape,
                    right: v.matrix.shape(),
                });
            }
        }
        Ok(Self { views })
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn views(&self) -> &[ViewKernel] {
        &self.views
    }

    pub fn matrices(&self) -> Vec<KernelMatrix> {
        self.views.iter().map(|v| v.matrix.clone()).collect()
    }

    pub fn combine(&self, weights: &[f64]) -> Result<KernelMatrix> {
        combine_kernels(&self.matrices(), weights)
    }
}
