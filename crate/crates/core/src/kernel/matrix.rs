use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Dense kernel matrix: square for train-train, `N_test × N_train` for cross
/// kernels.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    data: DMatrix<f64>,
}

impl KernelMatrix {
    pub fn from_matrix(data: DMatrix<f64>) -> Self {
        Self { data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        Self {
            data: DMatrix::from_fn(rows, cols, f),
        }
    }

    /// Row-major construction.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(Error::Ragged {
                    row: i,
                    expected: m,
                    found: r.len(),
                });
            }
        }
        Ok(Self::from_fn(n, m, |i, j| rows[i][j]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(DMatrix::identity(n, n))
    }

    pub fn ones(n: usize) -> Self {
        Self::from_matrix(DMatrix::from_element(n, n, 1.0))
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.shape()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[(i, j)] = v;
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.ncols()).map(|j| self.get(i, j)).collect()
    }

    /// Principal submatrix on `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> KernelMatrix {
        Self::from_fn(indices.len(), indices.len(), |a, b| {
            self.get(indices[a], indices[b])
        })
    }

    /// Largest `|K_ij - K_ji|`; zero for symmetric matrices.
    pub fn symmetry_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: (self.nrows(), self.nrows()),
            });
        }
        let sym = (&self.data + self.data.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Serializes as `"rows cols"` followed by one line per row of
    /// space-separated values with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nrows(), self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                if j > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{:.16e}", self.get(i, j));
            }
            s.push('\n');
        }
        s
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {rows} rows, found {i}")))?
                .map_err(|e| Error::Parse(e.to_string()))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad value {t:?}"))))
                .collect::<Result<_>>()?;
            if vals.len() != cols {
                return Err(Error::Ragged {
                    row: i,
                    expected: cols,
                    found: vals.len(),
                });
            }
            for (j, v) in vals.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip_is_exact() {
        let k = KernelMatrix::from_fn(2, 3, |i, j| (i as f64 + 1.0) / (j as f64 + 3.0));
        let back = KernelMatrix::read_text(k.to_text().as_bytes()).unwrap();
        assert_eq!(k, back);
        assert!(k.to_text().starts_with("2 3\n"));
    }

    #[test]
    fn read_rejects_short_rows() {
        assert!(KernelMatrix::read_text("2 2\n1 0\n0\n".as_bytes()).is_err());
        assert!(KernelMatrix::read_text("2\n".as_bytes()).is_err());
    }

    #[test]
    fn submatrix_picks_entries() {
        let k = KernelMatrix::from_fn(3, 3, |i, j| (3 * i + j) as f64);
        let s = k.submatrix(&[2, 0]);
        assert_eq!(s.get(0, 0), 8.0);
        assert_eq!(s.get(0, 1), 6.0);
        assert_eq!(s.get(1, 0), 2.0);
    }
}
