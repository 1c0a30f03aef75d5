use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Centering mean and projection axes fitted on a row subset.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaTransform {
    mean: DVector<f64>,
    /// `d × d_r`, one unit component per column.
    components: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl PcaTransform {
    /// Fits on `rows[fit]`. Components are ordered by descending variance and
    /// signed so that each one's largest-magnitude coordinate is positive.
    pub fn fit(rows: &[Vec<f64>], fit: &[usize], dim: usize) -> Result<Self> {
        if fit.is_empty() {
            return Err(Error::EmptyInput);
        }
        let d = rows[fit[0]].len();
        if dim == 0 || dim > d {
            return Err(Error::RankDeficient {
                requested: dim,
                rank: d,
            });
        }
        let n = fit.len();
        let mut mean = DVector::zeros(d);
        for &i in fit {
            if rows[i].len() != d {
                return Err(Error::Ragged {
                    row: i,
                    expected: d,
                    found: rows[i].len(),
                });
            }
            mean += DVector::from_column_slice(&rows[i]);
        }
        mean /= n as f64;
        let centered = DMatrix::from_fn(n, d, |r, c| rows[fit[r]][c] - mean[c]);
        let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
        let cov = (centered.transpose() * &centered) / denom;
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

        let top = eig.eigenvalues[order[0]].max(0.0);
        let tol = top * d as f64 * f64::EPSILON * 16.0;
        let rank = order.iter().filter(|&&k| eig.eigenvalues[k] > tol).count();
        if top == 0.0 || rank < dim {
            return Err(Error::RankDeficient {
                requested: dim,
                rank,
            });
        }

        let mut components = DMatrix::zeros(d, dim);
        let mut eigenvalues = Vec::with_capacity(dim);
        for (col, &k) in order.iter().take(dim).enumerate() {
            let mut v = eig.eigenvectors.column(k).into_owned();
            let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if pivot < 0.0 {
                v = -v;
            }
            components.set_column(col, &v);
            eigenvalues.push(eig.eigenvalues[k]);
        }
        Ok(Self {
            mean,
            components,
            eigenvalues,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.ncols()
    }

    /// Variances along the kept components, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: row.len(),
            });
        }
        let c = DVector::from_column_slice(row) - &self.mean;
        Ok((self.components.transpose() * c).iter().copied().collect())
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// Fits PCA on `rows[fit]` and projects every row.
pub fn pca_reduce(rows: &[Vec<f64>], dim: usize, fit: &[usize]) -> Result<(Vec<Vec<f64>>, PcaTransform)> {
    let t = PcaTransform::fit(rows, fit, dim)?;
    Ok((t.transform(rows)?, t))
}
