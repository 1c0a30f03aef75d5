use super::matrix::KernelMatrix;
use crate::error::{Error, Result};

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean Euclidean distance over unordered pairs `i < j`.
pub fn mean_pairwise_distance<R: AsRef<[f64]>>(x: &[R]) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: n });
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += sq_dist(x[i].as_ref(), x[j].as_ref()).sqrt();
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

/// Gaussian kernel `exp(-‖x_i - x_j‖² / (2σ²))` with `σ` the mean pairwise
/// distance of `x`. Returns the matrix and `σ`.
pub fn gaussian_kernel_matrix<R: AsRef<[f64]>>(x: &[R]) -> Result<(KernelMatrix, f64)> {
    let sigma = mean_pairwise_distance(x)?;
    if sigma <= 0.0 {
        return Err(Error::DegenerateBandwidth);
    }
    Ok((gaussian_cross_kernel(x, x, sigma)?, sigma))
}

/// Rectangular Gaussian kernel with a fixed bandwidth.
pub fn gaussian_cross_kernel<R: AsRef<[f64]>, S: AsRef<[f64]>>(
    x_rows: &[R],
    x_cols: &[S],
    sigma: f64,
) -> Result<KernelMatrix> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::DegenerateBandwidth);
    }
    let d = x_cols.first().map_or(0, |r| r.as_ref().len());
    let lens = x_rows.iter().map(|r| r.as_ref().len());
    if let Some(bad) = lens.chain(x_cols.iter().map(|r| r.as_ref().len())).find(|&l| l != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad });
    }
    let denom = 2.0 * sigma * sigma;
    Ok(KernelMatrix::from_fn(x_rows.len(), x_cols.len(), |i, j| {
        (-sq_dist(x_rows[i].as_ref(), x_cols[j].as_ref()) / denom).exp()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_on_a_line() {
        let (k, sigma) = gaussian_kernel_matrix(&[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(sigma, 2.0);
        assert!((k.get(0, 1) - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(k.get(0, 0), 1.0);
    }

    #[test]
    fn identical_points_are_degenerate() {
        assert!(matches!(
            gaussian_kernel_matrix(&[vec![1.0, 1.0], vec![1.0, 1.0]]),
            Err(Error::DegenerateBandwidth)
        ));
    }

    #[test]
    fn collinear_points_psd() {
        let (k, _) = gaussian_kernel_matrix(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(k.symmetry_deviation(), 0.0);
        assert!(k.min_eigenvalue().unwrap() >= -1e-12);
    }
}
