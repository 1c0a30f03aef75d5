use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Per-dimension affine map onto `[0, π]` fitted on a row subset.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleTransform {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl ScaleTransform {
    pub fn fit(rows: &[Vec<f64>], fit: &[usize]) -> Result<Self> {
        let first = fit.first().ok_or(Error::EmptyInput)?;
        let d = rows[*first].len();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for &i in fit {
            if rows[i].len() != d {
                return Err(Error::Ragged {
                    row: i,
                    expected: d,
                    found: rows[i].len(),
                });
            }
            for (c, &v) in rows[i].iter().enumerate() {
                min[c] = min[c].min(v);
                max[c] = max[c].max(v);
            }
        }
        Ok(Self { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Maps fit min to 0 and fit max to π, clipping to `[0, π]`; constant
    /// dimensions go to π/2.
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: row.len(),
            });
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(c, &v)| {
                let span = self.max[c] - self.min[c];
                if span > 0.0 {
                    ((v - self.min[c]) / span * PI).clamp(0.0, PI)
                } else {
                    FRAC_PI_2
                }
            })
            .collect())
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// Fits the scaling on `rows[fit]` and applies it to every row.
pub fn scale_features(rows: &[Vec<f64>], fit: &[usize]) -> Result<(Vec<Vec<f64>>, ScaleTransform)> {
    let t = ScaleTransform::fit(rows, fit)?;
    Ok((t.transform(rows)?, t))
}
