//! Kernel-target alignment: global (TA), neighbourhood-local (LTA) and their
//! hybrid (HTA), with analytic gradients through kernel parameters.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{KernelGradients, KernelMatrix};

/// Labels `y ∈ {-1, +1}^N`; the ideal kernel is `K* = y yᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetKernel {
    labels: Vec<i8>,
}

impl TargetKernel {
    pub fn new(labels: &[i8]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(Error::InvalidLabel(bad as i64));
        }
        Ok(Self {
            labels: labels.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    #[inline]
    pub fn y(&self, i: usize) -> f64 {
        f64::from(self.labels[i])
    }

    /// `K*_{ij} = y_i y_j`.
    pub fn matrix(&self) -> KernelMatrix {
        let n = self.len();
        KernelMatrix::from_fn(n, n, |i, j| self.y(i) * self.y(j))
    }

    pub fn restrict(&self, indices: &[usize]) -> TargetKernel {
        TargetKernel {
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Whether a neighbourhood contains its anchor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorPolicy {
    /// `𝒩_i = {i} ∪ (k-1 nearest others)`.
    #[default]
    Include,
    /// `𝒩_i = k nearest others`.
    Exclude,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeighborMode {
    Distance,
    Kernel,
}

/// Per-instance neighbourhoods, each of exactly `k` distinct indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSets {
    lists: Vec<Vec<usize>>,
    k: usize,
    mode: NeighborMode,
    policy: AnchorPolicy,
}

impl NeighborSets {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn mode(&self) -> NeighborMode {
        self.mode
    }

    pub fn policy(&self) -> AnchorPolicy {
        self.policy
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.lists.iter().map(Vec::as_slice)
    }

    /// One line per anchor, space-separated indices.
    pub fn to_text(&self) -> String {
        self.lists
            .iter()
            .map(|l| {
                l.iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn check_k(k: usize, n: usize, policy: AnchorPolicy) -> Result<()> {
    let max = match policy {
        AnchorPolicy::Include => n,
        AnchorPolicy::Exclude => n.saturating_sub(1),
    };
    if k == 0 || k > max {
        return Err(Error::NeighborCount { k, n });
    }
    Ok(())
}

/// Builds neighbourhoods from an ordering of candidates per anchor. `better`
/// returns `Ordering::Less` when its first argument should be picked first;
/// ties fall back to the smaller index.
fn build_sets(
    n: usize,
    k: usize,
    policy: AnchorPolicy,
    mode: NeighborMode,
    mut better: impl FnMut(usize, usize, usize) -> Ordering,
) -> NeighborSets {
    let others = match policy {
        AnchorPolicy::Include => k - 1,
        AnchorPolicy::Exclude => k,
    };
    let lists = (0..n)
        .map(|i| {
            let mut cand: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            cand.sort_by(|&a, &b| better(i, a, b).then(a.cmp(&b)));
            let mut list = Vec::with_capacity(k);
            if policy == AnchorPolicy::Include {
                list.push(i);
            }
            list.extend_from_slice(&cand[..others]);
            list
        })
        .collect();
    NeighborSets {
        lists,
        k,
        mode,
        policy,
    }
}

/// Euclidean k-nearest neighbourhoods.
pub fn knn_by_distance<R: AsRef<[f64]>>(
    x: &[R],
    k: usize,
    policy: AnchorPolicy,
) -> Result<NeighborSets> {
    let n = x.len();
    check_k(k, n, policy)?;
    let d = x[0].as_ref().len();
    for (row, r) in x.iter().enumerate() {
        if r.as_ref().len() != d {
            return Err(Error::Ragged {
                row,
                expected: d,
                found: r.as_ref().len(),
            });
        }
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s: f64 = x[i]
                .as_ref()
                .iter()
                .zip(x[j].as_ref())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dist[i * n + j] = s;
            dist[j * n + i] = s;
        }
    }
    Ok(build_sets(n, k, policy, NeighborMode::Distance, |i, a, b| {
        dist[i * n + a].total_cmp(&dist[i * n + b])
    }))
}

/// Neighbourhoods of the `k` most similar instances under a kernel.
pub fn knn_by_kernel(kernel: &KernelMatrix, k: usize, policy: AnchorPolicy) -> Result<NeighborSets> {
    if !kernel.is_square() {
        return Err(Error::ShapeMismatch {
            left: kernel.shape(),
            right: (kernel.nrows(), kernel.nrows()),
        });
    }
    let n = kernel.nrows();
    check_k(k, n, policy)?;
    Ok(build_sets(n, k, policy, NeighborMode::Kernel, |i, a, b| {
        kernel.get(i, b).total_cmp(&kernel.get(i, a))
    }))
}

/// `⟨A, B⟩_F = Σ_ij A_ij B_ij`.
pub fn frobenius_inner(a: &KernelMatrix, b: &KernelMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(a.as_matrix().dot(b.as_matrix()))
}

fn check_target(kernel: &KernelMatrix, target: &TargetKernel) -> Result<usize> {
    let n = target.len();
    if kernel.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            left: kernel.shape(),
            right: (n, n),
        });
    }
    Ok(n)
}

/// `(Σ y_i y_j K_ij, Σ K_ij²)`.
fn alignment_sums(kernel: &KernelMatrix, target: &TargetKernel) -> (f64, f64) {
    let n = target.len();
    let mut num = 0.0;
    let mut sq = 0.0;
    for j in 0..n {
        for i in 0..n {
            let v = kernel.get(i, j);
            num += target.y(i) * target.y(j) * v;
            sq += v * v;
        }
    }
    (num, sq)
}

/// `TA(K, K*) = Σ y_i y_j K_ij / (N √(Σ K_ij²))`.
pub fn target_alignment(kernel: &KernelMatrix, target: &TargetKernel) -> Result<f64> {
    let n = check_target(kernel, target)?;
    let (num, sq) = alignment_sums(kernel, target);
    if sq <= 0.0 {
        return Err(Error::ZeroKernel);
    }
    Ok(num / (n as f64 * sq.sqrt()))
}

fn check_neighbors(neighbors: &NeighborSets, n: usize) -> Result<()> {
    if neighbors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: neighbors.len(),
        });
    }
    if let Some(&bad) = neighbors.iter().flatten().find(|&&j| j >= n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad,
        });
    }
    Ok(())
}

/// Mean of `TA(K_i, K_i*)` over the neighbourhood restrictions.
pub fn local_target_alignment(
    kernel: &KernelMatrix,
    target: &TargetKernel,
    neighbors: &NeighborSets,
) -> Result<f64> {
    let n = check_target(kernel, target)?;
    check_neighbors(neighbors, n)?;
    let mut total = 0.0;
    for nb in neighbors.iter() {
        total += target_alignment(&kernel.submatrix(nb), &target.restrict(nb))?;
    }
    Ok(total / n as f64)
}

/// Hybrid parameter `λ` and neighbourhood size `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentConfig {
    pub lambda: f64,
    pub k: usize,
}

impl AlignmentConfig {
    pub fn new(lambda: f64, k: usize) -> Result<Self> {
        let c = Self { lambda, k };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if self.k < 2 {
            return Err(Error::InvalidConfig(format!("k = {} < 2", self.k)));
        }
        Ok(())
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if self.k > n {
            return Err(Error::NeighborCount { k: self.k, n });
        }
        Ok(())
    }
}

/// Global, local and hybrid alignment at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alignments {
    pub global: f64,
    pub local: f64,
    pub hybrid: f64,
}

/// `(1-λ)·LTA + λ·TA`.
pub fn hybrid_alignment(
    kernel: &KernelMatrix,
    target: &TargetKernel,
    neighbors: &NeighborSets,
    lambda: f64,
) -> Result<f64> {
    Ok(alignments(kernel, target, neighbors, lambda)?.hybrid)
}

pub fn alignments(
    kernel: &KernelMatrix,
    target: &TargetKernel,
    neighbors: &NeighborSets,
    lambda: f64,
) -> Result<Alignments> {
    let global = target_alignment(kernel, target)?;
    let local = local_target_alignment(kernel, target, neighbors)?;
    Ok(Alignments {
        global,
        local,
        hybrid: (1.0 - lambda) * local + lambda * global,
    })
}

/// Gradient of [`target_alignment`] given per-entry kernel gradients:
///
/// `g = [Σ y_i y_j ∇κ_ij · Σ κ_ij² − Σ y_i y_j κ_ij · Σ κ_ij ∇κ_ij] / (N (Σ κ_ij²)^{3/2})`.
pub fn alignment_gradient(
    kernel: &KernelMatrix,
    grads: &KernelGradients,
    target: &TargetKernel,
) -> Result<Vec<f64>> {
    let n = check_target(kernel, target)?;
    if grads.size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grads.size(),
        });
    }
    let p = grads.num_params();
    let (num, sq) = alignment_sums(kernel, target);
    if sq <= 0.0 {
        return Err(Error::ZeroKernel);
    }
    let mut d_num = vec![0.0; p];
    let mut d_sq_half = vec![0.0; p];
    for j in 0..n {
        for i in 0..n {
            let v = kernel.get(i, j);
            let yy = target.y(i) * target.y(j);
            for (t, &g) in grads.get(i, j).iter().enumerate() {
                d_num[t] += yy * g;
                d_sq_half[t] += v * g;
            }
        }
    }
    let denom = n as f64 * sq.powf(1.5);
    Ok(d_num
        .iter()
        .zip(&d_sq_half)
        .map(|(dn, ds)| (dn * sq - num * ds) / denom)
        .collect())
}

/// `(1-λ)/N · Σ_i g_i + λ · g`, with `N` the number of local gradients.
pub fn hybrid_gradient(global: &[f64], local: &[Vec<f64>], lambda: f64) -> Result<Vec<f64>> {
    let p = global.len();
    if let Some(bad) = local.iter().find(|g| g.len() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad.len(),
        });
    }
    let mut out: Vec<f64> = global.iter().map(|g| lambda * g).collect();
    if !local.is_empty() {
        let w = (1.0 - lambda) / local.len() as f64;
        let mut sum = vec![0.0; p];
        for g in local {
            for (s, v) in sum.iter_mut().zip(g) {
                *s += v;
            }
        }
        for (o, s) in out.iter_mut().zip(&sum) {
            *o += w * s;
        }
    }
    Ok(out)
}

/// HTA gradient for the anchors in `anchors` (all of them for full batch).
///
/// The global term uses the kernel restricted to `anchors`; the local term
/// averages the alignment gradients of each anchor's neighbourhood.
pub fn hta_gradient(
    kernel: &KernelMatrix,
    grads: &KernelGradients,
    target: &TargetKernel,
    neighbors: &NeighborSets,
    anchors: &[usize],
    lambda: f64,
) -> Result<Vec<f64>> {
    let n = check_target(kernel, target)?;
    check_neighbors(neighbors, n)?;
    let global = if lambda > 0.0 {
        let full = anchors.len() == n && anchors.iter().enumerate().all(|(a, &i)| a == i);
        if full {
            alignment_gradient(kernel, grads, target)?
        } else {
            alignment_gradient(
                &kernel.submatrix(anchors),
                &grads.submatrix(anchors),
                &target.restrict(anchors),
            )?
        }
    } else {
        vec![0.0; grads.num_params()]
    };
    let local = if lambda < 1.0 {
        anchors
            .iter()
            .map(|&i| {
                let nb = neighbors.get(i);
                alignment_gradient(
                    &kernel.submatrix(nb),
                    &grads.submatrix(nb),
                    &target.restrict(nb),
                )
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    if local.is_empty() {
        return Ok(global);
    }
    hybrid_gradient(&global, &local, lambda)
}
