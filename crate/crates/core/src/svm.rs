//! Soft-margin C-SVC on a precomputed kernel.
//!
//! The dual `min ½ αᵀQα − eᵀα, 0 ≤ α ≤ C, yᵀα = 0` with `Q_ij = y_i y_j K_ij`
//! is solved by pairwise (SMO) updates with second-order working-set
//! selection. Internally the labels are oriented so that the first training
//! label is `+1`; the solve is therefore bit-identical under a global label
//! flip and predictions flip exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-3,
            max_iterations: 10_000_000,
        }
    }
}

impl SvmParams {
    pub fn with_c(c: f64) -> Self {
        Self {
            c,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    alpha: Vec<f64>,
    labels: Vec<i8>,
    bias: f64,
    c: f64,
    support: Vec<usize>,
    kkt_violation: f64,
    iterations: usize,
    #[serde(skip)]
    train_decision: Vec<f64>,
}

impl SvmModel {
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Maximal KKT violation `m(α) − M(α)` at termination.
    pub fn kkt_violation(&self) -> f64 {
        self.kkt_violation
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Decision values on the training kernel, cached at fit time.
    pub fn train_decision(&self) -> &[f64] {
        &self.train_decision
    }

    /// `Σ_j α_j y_j K[i, j] + b` for every row of `k_cross`.
    pub fn decision_function(&self, k_cross: &KernelMatrix) -> Result<Vec<f64>> {
        let n = self.alpha.len();
        if k_cross.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: k_cross.ncols(),
            });
        }
        Ok((0..k_cross.nrows())
            .map(|i| {
                let mut s = 0.0;
                for &j in &self.support {
                    s += self.alpha[j] * f64::from(self.labels[j]) * k_cross.get(i, j);
                }
                s + self.bias
            })
            .collect())
    }

    /// Plain-text dump: `c`, `bias`, then one `index alpha label` line per
    /// support vector.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "c {:.17e}", self.c);
        let _ = writeln!(s, "bias {:.17e}", self.bias);
        let _ = writeln!(s, "n {}", self.alpha.len());
        for &i in &self.support {
            let _ = writeln!(s, "sv {} {:.17e} {}", i, self.alpha[i], self.labels[i]);
        }
        s
    }

    /// Parses [`SvmModel::to_text`]. Training labels of non-support vectors
    /// are not stored and come back as `+1` with `α = 0`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = None;
        let mut bias = None;
        let mut n = None;
        let mut svs = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(line.to_string()));
            match f.as_slice() {
                ["c", v] => c = Some(num(v)?),
                ["bias", v] => bias = Some(num(v)?),
                ["n", v] => n = Some(v.parse::<usize>().map_err(|_| Error::Parse(line.into()))?),
                ["sv", i, a, y] => svs.push((
                    i.parse::<usize>().map_err(|_| Error::Parse(line.into()))?,
                    num(a)?,
                    y.parse::<i8>().map_err(|_| Error::Parse(line.into()))?,
                )),
                _ => return Err(Error::Parse(format!("unrecognized line {line:?}"))),
            }
        }
        let (Some(c), Some(bias), Some(n)) = (c, bias, n) else {
            return Err(Error::Parse("missing c, bias or n".into()));
        };
        let mut alpha = vec![0.0; n];
        let mut labels = vec![1i8; n];
        let mut support = Vec::with_capacity(svs.len());
        for (i, a, y) in svs {
            if i >= n {
                return Err(Error::Parse(format!("support index {i} >= {n}")));
            }
            alpha[i] = a;
            labels[i] = y;
            support.push(i);
        }
        Ok(Self {
            alpha,
            labels,
            bias,
            c,
            support,
            kkt_violation: f64::NAN,
            iterations: 0,
            train_decision: Vec::new(),
        })
    }
}

/// Trains a C-SVC on a precomputed symmetric kernel.
pub fn svm_fit(k_train: &KernelMatrix, labels: &[i8], params: &SvmParams) -> Result<SvmModel> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if k_train.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            left: k_train.shape(),
            right: (n, n),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::InvalidLabel(bad as i64));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::InvalidConfig(format!("C = {} must be positive", params.c)));
    }
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(Error::SingleClass);
    }
    let scale = k_train.as_matrix().amax().max(1.0);
    let deviation = k_train.symmetry_deviation();
    if deviation > 1e-9 * scale {
        return Err(Error::NotSymmetric { deviation });
    }

    let orient = f64::from(labels[0]);
    let y: Vec<f64> = labels.iter().map(|&l| orient * f64::from(l)).collect();
    let solution = solve_dual(k_train, &y, params)?;

    let support = (0..n).filter(|&i| solution.alpha[i] > 0.0).collect();
    let mut model = SvmModel {
        alpha: solution.alpha,
        labels: labels.to_vec(),
        bias: -orient * solution.rho,
        c: params.c,
        support,
        kkt_violation: solution.violation,
        iterations: solution.iterations,
        train_decision: Vec::new(),
    };
    model.train_decision = model.decision_function(k_train)?;
    Ok(model)
}

/// Labels from decision values; a zero decision value maps to `+1`.
pub fn svm_predict(model: &SvmModel, k_cross: &KernelMatrix) -> Result<Vec<i8>> {
    Ok(model
        .decision_function(k_cross)?
        .into_iter()
        .map(|f| if f >= 0.0 { 1 } else { -1 })
        .collect())
}

/// Fraction of exact matches.
pub fn accuracy(predicted: &[i8], actual: &[i8]) -> Result<f64> {
    if predicted.is_empty() {
        return Err(Error::EmptyInput);
    }
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    let hits = predicted.iter().zip(actual).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / actual.len() as f64)
}

struct DualSolution {
    alpha: Vec<f64>,
    rho: f64,
    violation: f64,
    iterations: usize,
}

fn solve_dual(k: &KernelMatrix, y: &[f64], params: &SvmParams) -> Result<DualSolution> {
    let n = y.len();
    let c = params.c;
    let q = |i: usize, j: usize| y[i] * y[j] * k.get(i, j);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let is_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let is_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    let violation = loop {
        // i maximizes -y_t ∇_t over I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if is_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = None;
        let mut best = f64::INFINITY;
        if let Some(i) = i_sel {
            for t in 0..n {
                if !is_low(alpha[t], y[t]) {
                    continue;
                }
                let v = -y[t] * grad[t];
                gmin = gmin.min(v);
                let b = gmax - v;
                if b > 0.0 {
                    let mut a = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * q(i, t);
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let obj = -(b * b) / a;
                    if obj < best {
                        best = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let gap = gmax - gmin;
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            break gap.max(0.0);
        };
        if gap < params.tolerance {
            break gap;
        }
        if iterations >= params.max_iterations {
            return Err(Error::QpNotConverged { iterations });
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    };

    // ρ from free vectors, else the midpoint of the feasible interval.
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (upper + lower) / 2.0
    };
    Ok(DualSolution {
        alpha,
        rho,
        violation,
        iterations,
    })
}
