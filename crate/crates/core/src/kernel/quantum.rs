use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::matrix::KernelMatrix;
use crate::error::{Error, Result};
use crate::qsim::{
    build_ansatz_circuit, build_overlap_circuit, run_circuit, run_with_tangents, AnsatzParams,
    StateVector,
};

/// How matrix entries are evaluated.
///
/// Both routes compute `|⟨0|W(x_j)† W(x_i)|0⟩|²`. `AdjointCircuit` simulates
/// the compute-uncompute circuit once per pair; `StateOverlap` simulates
/// `W(x)|0⟩` once per sample and takes inner products.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Evaluation {
    AdjointCircuit,
    #[default]
    StateOverlap,
}

/// `κ(x_i, x_j)` from the all-zeros probability of the overlap circuit.
pub fn quantum_kernel_value(xi: &[f64], xj: &[f64], params: &AnsatzParams) -> Result<f64> {
    let circuit = build_overlap_circuit(xi, xj, params)?;
    let out = run_circuit(&circuit, &StateVector::zero(xi.len())?)?;
    Ok(out.zero_probability())
}

/// Gradient of `κ(x_i, x_j)` with respect to `(β, γ)` by analytic statevector
/// differentiation.
pub fn quantum_kernel_gradient(xi: &[f64], xj: &[f64], params: &AnsatzParams) -> Result<Vec<f64>> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            found: xj.len(),
        });
    }
    let a = EncodedSample::new(xi, params, true)?;
    let b = EncodedSample::new(xj, params, true)?;
    Ok(pair_gradient(&a, &b))
}

/// Gradient of `κ(x_i, x_j)` by the parameter-shift rule, summed over every
/// gate occurrence of each shared parameter in the overlap circuit.
pub fn parameter_shift_gradient(
    xi: &[f64],
    xj: &[f64],
    params: &AnsatzParams,
) -> Result<Vec<f64>> {
    let circuit = build_overlap_circuit(xi, xj, params)?;
    let zero = StateVector::zero(xi.len())?;
    let mut grad = vec![0.0; params.num_params()];
    for (pos, binding) in circuit.bindings().iter().enumerate() {
        let Some(b) = binding else { continue };
        let plus = run_circuit(&circuit.with_shifted_gate(pos, FRAC_PI_2), &zero)?;
        let minus = run_circuit(&circuit.with_shifted_gate(pos, -FRAC_PI_2), &zero)?;
        grad[b.index] += b.scale * 0.5 * (plus.zero_probability() - minus.zero_probability());
    }
    Ok(grad)
}

/// `W(x, θ)|0⟩` and optionally its parameter derivatives.
#[derive(Clone, Debug)]
pub struct EncodedSample {
    state: StateVector,
    tangents: Vec<StateVector>,
}

impl EncodedSample {
    pub fn new(x: &[f64], params: &AnsatzParams, with_tangents: bool) -> Result<Self> {
        let circuit = build_ansatz_circuit(x, params)?;
        if with_tangents {
            let (state, tangents) = run_with_tangents(&circuit, params.num_params())?;
            Ok(Self { state, tangents })
        } else {
            let state = run_circuit(&circuit, &StateVector::zero(x.len())?)?;
            Ok(Self {
                state,
                tangents: Vec::new(),
            })
        }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }
}

fn pair_value(a: &EncodedSample, b: &EncodedSample) -> f64 {
    b.state.inner(&a.state).norm_sqr().clamp(0.0, 1.0)
}

/// `∂κ = 2 Re(conj(z) ∂z)` with `z = ⟨ψ_j|ψ_i⟩`.
fn pair_gradient(a: &EncodedSample, b: &EncodedSample) -> Vec<f64> {
    let z = b.state.inner(&a.state);
    a.tangents
        .iter()
        .zip(&b.tangents)
        .map(|(da, db)| {
            let dz: Complex64 = db.inner(&a.state) + b.state.inner(da);
            2.0 * (z.conj() * dz).re
        })
        .collect()
}

fn check_uniform<R: AsRef<[f64]>>(x: &[R]) -> Result<usize> {
    let d = x.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyInput)?;
    for (i, r) in x.iter().enumerate() {
        if r.as_ref().len() != d {
            return Err(Error::Ragged {
                row: i,
                expected: d,
                found: r.as_ref().len(),
            });
        }
    }
    Ok(d)
}

fn encode_all<R: AsRef<[f64]>>(
    x: &[R],
    params: &AnsatzParams,
    with_tangents: bool,
) -> Result<Vec<EncodedSample>> {
    x.iter()
        .map(|r| EncodedSample::new(r.as_ref(), params, with_tangents))
        .collect()
}

/// Train-train quantum kernel matrix (unit diagonal, symmetric).
pub fn quantum_kernel_matrix<R: AsRef<[f64]>>(
    x: &[R],
    params: &AnsatzParams,
) -> Result<KernelMatrix> {
    quantum_kernel_matrix_with(x, params, Evaluation::default())
}

pub fn quantum_kernel_matrix_with<R: AsRef<[f64]>>(
    x: &[R],
    params: &AnsatzParams,
    evaluation: Evaluation,
) -> Result<KernelMatrix> {
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: x.len(),
        });
    }
    check_uniform(x)?;
    let n = x.len();
    let mut k = KernelMatrix::identity(n);
    match evaluation {
        Evaluation::StateOverlap => {
            let enc = encode_all(x, params, false)?;
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = pair_value(&enc[i], &enc[j]);
                    k.set(i, j, v);
                    k.set(j, i, v);
                }
            }
        }
        Evaluation::AdjointCircuit => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = quantum_kernel_value(x[i].as_ref(), x[j].as_ref(), params)?;
                    k.set(i, j, v);
                    k.set(j, i, v);
                }
            }
        }
    }
    Ok(k)
}

/// Rectangular `N_test × N_train` kernel.
pub fn cross_kernel_matrix<R: AsRef<[f64]>, S: AsRef<[f64]>>(
    x_test: &[R],
    x_train: &[S],
    params: &AnsatzParams,
) -> Result<KernelMatrix> {
    let d_train = check_uniform(x_train)?;
    let d_test = check_uniform(x_test)?;
    if d_test != d_train {
        return Err(Error::DimensionMismatch {
            expected: d_train,
            found: d_test,
        });
    }
    let test = encode_all(x_test, params, false)?;
    let train = encode_all(x_train, params, false)?;
    Ok(KernelMatrix::from_fn(test.len(), train.len(), |i, j| {
        pair_value(&test[i], &train[j])
    }))
}

/// Per-entry kernel gradients, `N × N × 2P`, symmetric in `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelGradients {
    n: usize,
    num_params: usize,
    data: Vec<f64>,
}

impl KernelGradients {
    pub fn zeros(n: usize, num_params: usize) -> Self {
        Self {
            n,
            num_params,
            data: vec![0.0; n * n * num_params],
        }
    }

    pub fn from_fn(n: usize, num_params: usize, mut f: impl FnMut(usize, usize) -> Vec<f64>) -> Self {
        let mut g = Self::zeros(n, num_params);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, &f(i, j));
            }
        }
        g
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        let off = (i * self.n + j) * self.num_params;
        &self.data[off..off + self.num_params]
    }

    pub fn set(&mut self, i: usize, j: usize, g: &[f64]) {
        let off = (i * self.n + j) * self.num_params;
        self.data[off..off + self.num_params].copy_from_slice(g);
    }

    /// Restriction to the principal block on `indices`.
    pub fn submatrix(&self, indices: &[usize]) -> KernelGradients {
        let mut out = Self::zeros(indices.len(), self.num_params);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }
}

/// Kernel matrix and its per-entry parameter gradients in one pass.
pub fn quantum_kernel_with_gradients<R: AsRef<[f64]>>(
    x: &[R],
    params: &AnsatzParams,
) -> Result<(KernelMatrix, KernelGradients)> {
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: x.len(),
        });
    }
    check_uniform(x)?;
    let n = x.len();
    let enc = encode_all(x, params, true)?;
    let mut k = KernelMatrix::identity(n);
    let mut g = KernelGradients::zeros(n, params.num_params());
    for i in 0..n {
        for j in (i + 1)..n {
            let v = pair_value(&enc[i], &enc[j]);
            k.set(i, j, v);
            k.set(j, i, v);
            let grad = pair_gradient(&enc[i], &enc[j]);
            g.set(i, j, &grad);
            g.set(j, i, &grad);
        }
    }
    Ok((k, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// κ for d = 1, P = 1, β = 0 computed from 2×2 matrix products:
    /// W(x) = RY(x)·H, overlap amplitude = ⟨0|H RY(-x_j) RY(x_i) H|0⟩ = cos((x_i - x_j)/2).
    fn cos2_oracle(xi: f64, xj: f64) -> f64 {
        ((xi - xj) / 2.0).cos().powi(2)
    }

    fn p1(beta: f64, gamma: f64) -> AnsatzParams {
        AnsatzParams::new(vec![beta], vec![gamma]).unwrap()
    }

    #[test]
    fn single_qubit_values_match_cos2() {
        let p = p1(0.0, 0.0);
        assert!(quantum_kernel_value(&[0.0], &[PI], &p).unwrap().abs() < 1e-15);
        assert!((quantum_kernel_value(&[0.0], &[PI / 2.0], &p).unwrap() - 0.5).abs() < 1e-15);
        for &(a, b) in &[(0.1, 2.9), (1.3, 0.4), (3.0, 3.0)] {
            let v = quantum_kernel_value(&[a], &[b], &p).unwrap();
            assert!((v - cos2_oracle(a, b)).abs() < 1e-14);
        }
    }

    #[test]
    fn identical_inputs_give_one() {
        let p = AnsatzParams::new(vec![0.3, 1.1], vec![0.7, 2.0]).unwrap();
        let x = [0.2, 1.4, 2.5];
        assert!((quantum_kernel_value(&x, &x, &p).unwrap() - 1.0).abs() < 1e-12);
        let g = quantum_kernel_gradient(&x, &x, &p).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn three_point_matrix() {
        let p = p1(0.0, 0.0);
        let x = vec![vec![0.0], vec![PI / 2.0], vec![PI]];
        for eval in [Evaluation::StateOverlap, Evaluation::AdjointCircuit] {
            let k = quantum_kernel_matrix_with(&x, &p, eval).unwrap();
            let want = [[1.0, 0.5, 0.0], [0.5, 1.0, 0.5], [0.0, 0.5, 1.0]];
            for i in 0..3 {
                for j in 0..3 {
                    assert!((k.get(i, j) - want[i][j]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn duplicate_rows_give_ones() {
        let p = p1(0.4, 0.9);
        let x = vec![vec![0.5, 1.0], vec![0.5, 1.0]];
        let k = quantum_kernel_matrix(&x, &p).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| (k.get(i, j) - 1.0).abs() < 1e-12)));
    }

    #[test]
    fn cross_kernel_examples() {
        let p = p1(0.0, 0.0);
        let train = vec![vec![0.0], vec![PI]];
        let k = cross_kernel_matrix(&[vec![PI / 2.0]], &train, &p).unwrap();
        assert!((k.get(0, 0) - 0.5).abs() < 1e-14 && (k.get(0, 1) - 0.5).abs() < 1e-14);

        let k = cross_kernel_matrix(&[vec![PI]], &train, &p).unwrap();
        assert!((k.get(0, 1) - 1.0).abs() < 1e-14);

        let sq = quantum_kernel_matrix(&train, &p).unwrap();
        let cr = cross_kernel_matrix(&train, &train, &p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((sq.get(i, j) - cr.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(matches!(
            cross_kernel_matrix(&[vec![0.0, 1.0]], &train, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn beta_gradient_vanishes_for_one_qubit() {
        // With one qubit RX(2β) is the last gate of W; it cancels against its
        // inverse in the overlap, so κ does not depend on β.
        for &(a, b, beta, gamma) in &[(0.3, 2.0, 0.7, 1.1), (1.5, 0.2, 2.9, 0.0)] {
            let p = p1(beta, gamma);
            let g = quantum_kernel_gradient(&[a], &[b], &p).unwrap();
            let s = parameter_shift_gradient(&[a], &[b], &p).unwrap();
            assert!(g[0].abs() < 1e-12 && s[0].abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_routes_agree() {
        let p = AnsatzParams::new(vec![0.3, 1.7], vec![0.9, 2.2]).unwrap();
        let xi = [0.4, 2.1, 1.0];
        let xj = [1.9, 0.3, 2.8];
        let g = quantum_kernel_gradient(&xi, &xj, &p).unwrap();
        let s = parameter_shift_gradient(&xi, &xj, &p).unwrap();
        for (a, b) in g.iter().zip(&s) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn too_few_or_ragged() {
        let p = p1(0.0, 0.0);
        assert!(quantum_kernel_matrix(&[vec![0.0]], &p).is_err());
        assert!(matches!(
            quantum_kernel_matrix(&[vec![0.0], vec![0.0, 1.0]], &p),
            Err(Error::Ragged { row: 1, .. })
        ));
    }
}
