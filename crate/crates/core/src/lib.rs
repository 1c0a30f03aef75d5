//! Trainable multi-view quantum kernels.
//!
//! Each view of a dataset gets its own parameterized quantum kernel, simulated
//! exactly on a statevector. Kernel parameters are fitted by gradient ascent
//! on a hybrid of global and neighbourhood-local kernel-target alignment, the
//! per-view kernels are fused with simplex weights obtained from a small
//! non-negative quadratic program, and the fused kernel feeds a soft-margin
//! SVM.

pub mod alignment;
pub mod data;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod qsim;
pub mod svm;
pub mod trainer;

pub use error::{Error, Result};
