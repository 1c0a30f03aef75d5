//! `min μᵀ𝓜μ − cᵀμ  s.t.  μ ≥ μ_floor`, with `c = (1−λ)a + λb`.
//!
//! Projected coordinate descent with exact per-coordinate minimization. Every
//! few sweeps the current free set is polished by solving its reduced linear
//! system (minimum-norm solution), which finishes ill-conditioned problems
//! that plain coordinate descent would crawl through. A polished point is
//! only accepted when it satisfies the KKT conditions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Lower bound on every `μ_q`.
pub const MU_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QpOptions {
    pub max_sweeps: usize,
    /// Stop when the largest coordinate change in a sweep is at most this.
    pub tolerance: f64,
    /// Relative KKT tolerance used to accept a polished point.
    pub kkt_tolerance: f64,
    pub polish_every: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 10_000,
            tolerance: 1e-10,
            kkt_tolerance: 1e-6,
            polish_every: 25,
        }
    }
}

fn linear_term(a: &[f64], b: &[f64], lambda: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect()
}

/// `μᵀ𝓜μ − (1−λ)μᵀa − λμᵀb`.
pub fn qp_objective(gram: &DMatrix<f64>, a: &[f64], b: &[f64], lambda: f64, mu: &[f64]) -> f64 {
    let c = linear_term(a, b, lambda);
    let m = DVector::from_column_slice(mu);
    (m.transpose() * gram * &m)[(0, 0)] - c.iter().zip(mu).map(|(c, u)| c * u).sum::<f64>()
}

fn gradient(gram: &DMatrix<f64>, c: &[f64], mu: &[f64]) -> Vec<f64> {
    let m = DVector::from_column_slice(mu);
    let gm = gram * m;
    gm.iter().zip(c).map(|(g, c)| 2.0 * g - c).collect()
}

/// Largest KKT violation relative to `1 + ‖∇f(μ_floor·1)‖`; zero at an
/// optimum.
pub fn qp_kkt_violation(gram: &DMatrix<f64>, a: &[f64], b: &[f64], lambda: f64, mu: &[f64]) -> f64 {
    let c = linear_term(a, b, lambda);
    let floor_grad = gradient(gram, &c, &vec![MU_FLOOR; mu.len()]);
    let scale = 1.0 + floor_grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let g = gradient(gram, &c, mu);
    let mut worst = 0.0f64;
    for (q, &gq) in g.iter().enumerate() {
        let v = if mu[q] <= MU_FLOOR * (1.0 + 1e-12) {
            (-gq).max(0.0)
        } else {
            gq.abs()
        };
        worst = worst.max(v / scale);
    }
    worst
}

/// Minimizes the QP; `𝓜` must be symmetric positive semidefinite.
pub fn solve_nonneg_qp(
    gram: &DMatrix<f64>,
    a: &[f64],
    b: &[f64],
    lambda: f64,
    options: &QpOptions,
) -> Result<Vec<f64>> {
    let m = gram.nrows();
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    if gram.ncols() != m {
        return Err(Error::ShapeMismatch {
            left: gram.shape(),
            right: (m, m),
        });
    }
    if a.len() != m || b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: if a.len() != m { a.len() } else { b.len() },
        });
    }
    let scale = gram.amax().max(1.0);
    let sym = (gram + gram.transpose()) * 0.5;
    let min_eig = SymmetricEigen::new(sym.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -1e-8 * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    let c = linear_term(a, b, lambda);
    let accept = |mu: &[f64]| qp_kkt_violation(&sym, a, b, lambda, mu) <= options.kkt_tolerance;

    // The unconstrained minimum-norm stationary point, when feasible, is the
    // answer (and keeps exchangeable coordinates equal).
    let all: Vec<usize> = (0..m).collect();
    if let Some(mu) = polish(&sym, &c, &all) {
        if accept(&mu) {
            return Ok(mu);
        }
    }

    let mut mu = vec![MU_FLOOR; m];
    for sweep in 1..=options.max_sweeps {
        let mut max_change = 0.0f64;
        for q in 0..m {
            let mut off = 0.0;
            for r in 0..m {
                if r != q {
                    off += sym[(q, r)] * mu[r];
                }
            }
            let diag = sym[(q, q)];
            let new = if diag > 0.0 {
                ((c[q] - 2.0 * off) / (2.0 * diag)).max(MU_FLOOR)
            } else if c[q] - 2.0 * off > 0.0 {
                // Linear and decreasing along this coordinate: unbounded.
                return Err(Error::QpNotConverged { iterations: sweep });
            } else {
                MU_FLOOR
            };
            max_change = max_change.max((new - mu[q]).abs());
            mu[q] = new;
        }
        if max_change <= options.tolerance {
            return Ok(mu);
        }
        if sweep % options.polish_every == 0 {
            let free: Vec<usize> = (0..m).filter(|&q| mu[q] > MU_FLOOR).collect();
            if let Some(p) = polish(&sym, &c, &free) {
                if accept(&p) {
                    return Ok(p);
                }
            }
        }
    }
    Err(Error::QpNotConverged {
        iterations: options.max_sweeps,
    })
}

/// Solves the stationarity system on `free` with the other coordinates at
/// the floor. Returns `None` if the solution leaves the feasible set.
fn polish(gram: &DMatrix<f64>, c: &[f64], free: &[usize]) -> Option<Vec<f64>> {
    let m = gram.nrows();
    if free.is_empty() {
        return Some(vec![MU_FLOOR; m]);
    }
    let nf = free.len();
    let is_free = |q: usize| free.contains(&q);
    let sub = DMatrix::from_fn(nf, nf, |i, j| 2.0 * gram[(free[i], free[j])]);
    let rhs = DVector::from_fn(nf, |i, _| {
        let q = free[i];
        let fixed: f64 = (0..m)
            .filter(|&r| !is_free(r))
            .map(|r| gram[(q, r)] * MU_FLOOR)
            .sum();
        c[q] - 2.0 * fixed
    });
    let eps = 1e-12 * sub.amax().max(f64::MIN_POSITIVE);
    let sol = sub.svd(true, true).solve(&rhs, eps).ok()?;
    let mut mu = vec![MU_FLOOR; m];
    for (i, &q) in free.iter().enumerate() {
        if !(sol[i].is_finite() && sol[i] >= MU_FLOOR) {
            return None;
        }
        mu[q] = sol[i];
    }
    Some(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_min(gram: &DMatrix<f64>, a: &[f64], b: &[f64], lambda: f64, hi: f64) -> (f64, [f64; 2]) {
        let steps = 2000;
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in 0..=steps {
            for j in 0..=steps {
                let mu = [
                    MU_FLOOR + hi * i as f64 / steps as f64,
                    MU_FLOOR + hi * j as f64 / steps as f64,
                ];
                let v = qp_objective(gram, a, b, lambda, &mu);
                if v < best.0 {
                    best = (v, mu);
                }
            }
        }
        best
    }

    #[test]
    fn identity_lambda_one() {
        let g = DMatrix::identity(2, 2);
        let mu = solve_nonneg_qp(&g, &[7.0, -3.0], &[2.0, 0.0], 1.0, &QpOptions::default()).unwrap();
        assert!((mu[0] - 1.0).abs() < 1e-9);
        assert!((mu[1] - MU_FLOOR).abs() < 1e-15);
        let (v, at) = grid_min(&g, &[7.0, -3.0], &[2.0, 0.0], 1.0, 2.0);
        assert!((at[0] - 1.0).abs() < 2e-3 && at[1] < 2e-3);
        assert!(qp_objective(&g, &[7.0, -3.0], &[2.0, 0.0], 1.0, &mu) <= v + 1e-6);
    }

    #[test]
    fn identity_lambda_zero_interior() {
        let g = DMatrix::identity(2, 2);
        let mu = solve_nonneg_qp(&g, &[2.0, 2.0], &[0.0, 0.0], 0.0, &QpOptions::default()).unwrap();
        assert!((mu[0] - 1.0).abs() < 1e-12 && (mu[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exchangeable_views_get_equal_weight() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.5, 0.5, 2.0, 0.5, 0.5, 0.5, 2.0]);
        let a = [1.0, 1.0, 1.0];
        let mu = solve_nonneg_qp(&g, &a, &a, 0.3, &QpOptions::default()).unwrap();
        assert!((mu[0] - mu[1]).abs() < 1e-12 && (mu[1] - mu[2]).abs() < 1e-12);

        // Singular: two identical views.
        let g = DMatrix::from_element(2, 2, 4.0);
        let mu = solve_nonneg_qp(&g, &[1.0, 1.0], &[1.0, 1.0], 0.5, &QpOptions::default()).unwrap();
        assert!((mu[0] - mu[1]).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            solve_nonneg_qp(&g, &[1.0, 1.0], &[1.0, 1.0], 0.5, &QpOptions::default()),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn ill_conditioned_converges() {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 0.9999, 0.9998, 0.9999, 1.0, 0.9999, 0.9998, 0.9999, 1.0]);
        let a = [0.5, 0.52, 0.49];
        let mu = solve_nonneg_qp(&g, &a, &a, 0.5, &QpOptions::default()).unwrap();
        assert!(qp_kkt_violation(&g, &a, &a, 0.5, &mu) <= 1e-6);
    }
}
