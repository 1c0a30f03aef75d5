//! Seeded property checks shared by the integration tests and the
//! acceptance target. Each check returns `Err` with a description of the
//! first violation.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmvkl::alignment::{
    hta_gradient, hybrid_alignment, knn_by_distance, local_target_alignment, target_alignment,
    AnchorPolicy, TargetKernel,
};
use qmvkl::kernel::{
    gaussian_kernel_matrix, quantum_kernel_gradient, quantum_kernel_matrix, quantum_kernel_value,
    quantum_kernel_with_gradients, KernelMatrix,
};
use qmvkl::qsim::{build_ansatz_circuit, run_circuit, AnsatzParams, Circuit, GateOp, StateVector};
use qmvkl::svm::{accuracy, svm_fit, svm_predict, SvmParams};
use qmvkl::trainer::{
    qp_kkt_violation, qp_objective, solve_nonneg_qp, train_base_kernel, train_weights, QpOptions,
    TrainConfig, WeightVector, MU_FLOOR,
};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(0.0..PI)).collect()).collect()
}

pub fn random_labels(rng: &mut impl Rng, n: usize) -> Vec<i8> {
    let mut y: Vec<i8> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    y[0] = 1;
    y[n - 1] = -1;
    y
}

pub fn random_params(rng: &mut impl Rng, depth: usize) -> AnsatzParams {
    AnsatzParams::random(depth, rng).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_gate(rng: &mut impl Rng, d: usize) -> GateOp {
    let q = rng.gen_range(0..d);
    let angle = rng.gen_range(-2.0 * PI..2.0 * PI);
    match rng.gen_range(0..if d > 1 { 5 } else { 4 }) {
        0 => GateOp::H(q),
        1 => GateOp::Rx(q, angle),
        2 => GateOp::Ry(q, angle),
        3 => GateOp::Rz(q, angle),
        _ => {
            let mut t = rng.gen_range(0..d - 1);
            if t >= q {
                t += 1;
            }
            GateOp::Cnot { control: q, target: t }
        }
    }
}

fn random_state(rng: &mut impl Rng, d: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Norm preservation and exact inversion on 1000 random circuits.
pub fn simulator_invariants() -> Check {
    let mut r = rng(11);
    for case in 0..1000 {
        let d = r.gen_range(1..=6);
        let len = r.gen_range(0..=200);
        let mut c = Circuit::new(d);
        for _ in 0..len {
            c.push(random_gate(&mut r, d)).map_err(|e| e.to_string())?;
        }
        let s = random_state(&mut r, d);
        let out = run_circuit(&c, &StateVector::zero(d).unwrap()).map_err(|e| e.to_string())?;
        ensure((out.norm_sqr() - 1.0).abs() <= 1e-9, || {
            format!("circuit {case}: norm {} after {len} gates", out.norm_sqr())
        })?;
        let fwd = run_circuit(&c, &s).map_err(|e| e.to_string())?;
        let back = run_circuit(&c.inverse(), &fwd).map_err(|e| e.to_string())?;
        let err = back
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        ensure(err <= 1e-9, || format!("circuit {case}: inverse error {err:e}"))?;
    }
    Ok(())
}

/// Gate counts of the ansatz match `d + P(3d - 1)` single-qubit gates and
/// `2P(d - 1)` CNOTs for every `d, P ∈ [1, 8]`.
pub fn gate_count_formulas() -> Check {
    let mut r = rng(12);
    for d in 1..=8 {
        for p in 1..=8 {
            let x: Vec<f64> = (0..d).map(|_| r.gen_range(0.0..PI)).collect();
            let c = build_ansatz_circuit(&x, &random_params(&mut r, p)).map_err(|e| e.to_string())?;
            let cnot = c.gates().iter().filter(|g| matches!(g, GateOp::Cnot { .. })).count();
            let single = c.gates().len() - cnot;
            let expected = (d + p * (3 * d - 1), 2 * p * (d - 1));
            ensure((single, cnot) == expected, || {
                format!("d={d} P={p}: counted {:?}, expected {expected:?}", (single, cnot))
            })?;
        }
    }
    Ok(())
}

fn check_square_kernel(k: &KernelMatrix, what: &str, unit_diag: bool) -> Check {
    let n = k.nrows();
    for i in 0..n {
        for j in 0..n {
            let v = k.get(i, j);
            ensure((v - k.get(j, i)).abs() <= 1e-12, || format!("{what}: asymmetric at ({i},{j})"))?;
            ensure((0.0..=1.0).contains(&v), || format!("{what}: entry {v} out of [0, 1]"))?;
        }
        if unit_diag {
            ensure((k.get(i, i) - 1.0).abs() <= 1e-9, || format!("{what}: diagonal {}", k.get(i, i)))?;
        }
    }
    let min = k.min_eigenvalue().map_err(|e| e.to_string())?;
    ensure(min >= -1e-8, || format!("{what}: min eigenvalue {min:e}"))
}

/// Symmetry, range, unit diagonal, PSD and permutation equivariance of
/// quantum and Gaussian kernel matrices on random inputs.
pub fn kernel_matrix_properties() -> Check {
    let mut r = rng(13);
    for case in 0..40 {
        let n = r.gen_range(2..=12);
        let d = r.gen_range(1..=4);
        let x = random_rows(&mut r, n, d);
        let depth = r.gen_range(1..=3);
        let params = random_params(&mut r, depth);
        let k = quantum_kernel_matrix(&x, &params).map_err(|e| e.to_string())?;
        check_square_kernel(&k, &format!("quantum case {case}"), true)?;
        let (g, _) = gaussian_kernel_matrix(&x).map_err(|e| e.to_string())?;
        check_square_kernel(&g, &format!("gaussian case {case}"), true)?;

        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, r.gen_range(0..=i));
        }
        let xp: Vec<Vec<f64>> = perm.iter().map(|&i| x[i].clone()).collect();
        let kp = quantum_kernel_matrix(&xp, &params).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in 0..n {
                ensure(kp.get(i, j) == k.get(perm[i], perm[j]), || {
                    format!("case {case}: permutation equivariance broken at ({i},{j})")
                })?;
            }
        }
    }
    Ok(())
}

/// With one qubit, one layer and `β = 0`, `κ(a, b) = cos²((a - b)/2)` for any `γ`.
pub fn single_qubit_oracle() -> Check {
    let mut r = rng(14);
    for _ in 0..200 {
        let (a, b) = (r.gen_range(0.0..PI), r.gen_range(0.0..PI));
        let gamma = r.gen_range(-PI..PI);
        let p = AnsatzParams::new(vec![0.0], vec![gamma]).unwrap();
        let k = quantum_kernel_value(&[a], &[b], &p).map_err(|e| e.to_string())?;
        let expected = ((a - b) / 2.0).cos().powi(2);
        ensure((k - expected).abs() <= 1e-12, || format!("κ({a}, {b}) = {k}, expected {expected}"))?;
    }
    Ok(())
}

fn central_difference(f: impl Fn(&[f64]) -> f64, theta: &[f64], h: f64) -> Vec<f64> {
    (0..theta.len())
        .map(|p| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[p] += h;
            minus[p] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

/// Kernel-entry gradients against central differences on 50 random
/// instances with `d ≤ 4`, `P ≤ 3`.
pub fn kernel_gradient_vs_fd() -> Check {
    let mut r = rng(15);
    for case in 0..50 {
        let d = r.gen_range(1..=4);
        let depth = r.gen_range(1..=3);
        let xi: Vec<f64> = (0..d).map(|_| r.gen_range(0.0..PI)).collect();
        let xj: Vec<f64> = (0..d).map(|_| r.gen_range(0.0..PI)).collect();
        let params = random_params(&mut r, depth);
        let g = quantum_kernel_gradient(&xi, &xj, &params).map_err(|e| e.to_string())?;
        let fd = central_difference(
            |t| quantum_kernel_value(&xi, &xj, &AnsatzParams::from_slice(t).unwrap()).unwrap(),
            &params.to_vec(),
            1e-5,
        );
        for (p, (a, b)) in g.iter().zip(&fd).enumerate() {
            ensure((a - b).abs() <= 1e-5 * b.abs() + 1e-8, || {
                format!("case {case} param {p}: analytic {a:e} vs finite difference {b:e}")
            })?;
        }
    }
    Ok(())
}

/// Gradient of the hybrid alignment through the circuit parameters against
/// central differences, relative error at most 1e-4.
pub fn hta_gradient_vs_fd() -> Check {
    let mut r = rng(16);
    for case in 0..20 {
        let n = r.gen_range(4..=8);
        let d = r.gen_range(1..=3);
        let depth = r.gen_range(1..=2);
        let k = r.gen_range(2..=n);
        let lambda = [0.0, 0.125, 0.5, 1.0][case % 4];
        let x = random_rows(&mut r, n, d);
        let target = TargetKernel::new(&random_labels(&mut r, n)).unwrap();
        let nb = knn_by_distance(&x, k, AnchorPolicy::Include).unwrap();
        let params = random_params(&mut r, depth);
        let (km, grads) = quantum_kernel_with_gradients(&x, &params).map_err(|e| e.to_string())?;
        let anchors: Vec<usize> = (0..n).collect();
        let g = hta_gradient(&km, &grads, &target, &nb, &anchors, lambda).map_err(|e| e.to_string())?;
        let fd = central_difference(
            |t| {
                let km = quantum_kernel_matrix(&x, &AnsatzParams::from_slice(t).unwrap()).unwrap();
                hybrid_alignment(&km, &target, &nb, lambda).unwrap()
            },
            &params.to_vec(),
            1e-5,
        );
        let diff = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = fd.iter().map(|b| b * b).sum::<f64>().sqrt();
        ensure(diff <= 1e-4 * scale + 1e-9, || {
            format!("case {case}: |g - fd| = {diff:e}, |fd| = {scale:e}")
        })?;
    }
    Ok(())
}

/// Hand-computed alignment values.
pub fn alignment_examples() -> Check {
    let close = |a: f64, b: f64, what: &str| ensure((a - b).abs() <= 1e-12, || format!("{what}: {a} vs {b}"));
    let y = TargetKernel::new(&[1, 1, -1]).unwrap();
    let ideal = y.matrix();
    close(target_alignment(&ideal, &y).unwrap(), 1.0, "TA(K*, K*)")?;
    close(target_alignment(&KernelMatrix::ones(3), &y).unwrap(), 1.0 / 9.0, "TA(ones)")?;
    close(
        target_alignment(&KernelMatrix::identity(3), &y).unwrap(),
        1.0 / 3f64.sqrt(),
        "TA(I)",
    )?;
    let x = [[0.0], [1.0], [10.0]];
    let nb2 = knn_by_distance(&x, 2, AnchorPolicy::Include).unwrap();
    ensure(
        nb2.iter().map(<[usize]>::to_vec).collect::<Vec<_>>() == vec![vec![0, 1], vec![1, 0], vec![2, 1]],
        || format!("knn on (0, 1, 10): {}", nb2.to_text()),
    )?;
    close(
        local_target_alignment(&KernelMatrix::identity(3), &y, &nb2).unwrap(),
        1.0 / 2f64.sqrt(),
        "LTA(I, k=2)",
    )?;
    close(local_target_alignment(&ideal, &y, &nb2).unwrap(), 1.0, "LTA(K*)")?;
    let nb3 = knn_by_distance(&x, 3, AnchorPolicy::Include).unwrap();
    let k = quantum_kernel_matrix(&x, &AnsatzParams::new(vec![0.3], vec![0.7]).unwrap()).unwrap();
    close(
        local_target_alignment(&k, &y, &nb3).unwrap(),
        target_alignment(&k, &y).unwrap(),
        "LTA with k = N",
    )?;
    let ta = target_alignment(&k, &y).unwrap();
    let lta = local_target_alignment(&k, &y, &nb2).unwrap();
    close(hybrid_alignment(&k, &y, &nb2, 1.0).unwrap(), ta, "HTA at λ=1")?;
    close(hybrid_alignment(&k, &y, &nb2, 0.0).unwrap(), lta, "HTA at λ=0")?;
    close(
        hybrid_alignment(&k, &y, &nb2, 0.5).unwrap(),
        0.5 * ta + 0.5 * lta,
        "HTA at λ=0.5",
    )
}

fn random_psd(rng: &mut impl Rng, m: usize, rank: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(m, rank, |_, _| rng.gen_range(-1.0..1.0));
    &b * b.transpose()
}

/// Solver KKT on 500 random PSD instances (including singular ones), the
/// descent property against random feasible points, and agreement with a
/// grid search when `M = 2`.
pub fn qp_properties() -> Check {
    let mut r = rng(17);
    let opts = QpOptions::default();
    for case in 0..500 {
        let m = r.gen_range(1..=6);
        let rank = r.gen_range(1..=m);
        let gram = random_psd(&mut r, m, rank);
        let lambda = r.gen_range(0.0..=1.0);
        // Linear terms in the range of 𝓜 keep the problem bounded below.
        let mut lin = || {
            let w = DMatrix::from_fn(m, 1, |_, _| r.gen_range(-1.0..1.0));
            (&gram * w).iter().copied().collect::<Vec<f64>>()
        };
        let (a, b) = (lin(), lin());
        let mu = solve_nonneg_qp(&gram, &a, &b, lambda, &opts).map_err(|e| format!("case {case}: {e}"))?;
        ensure(mu.iter().all(|&v| v >= MU_FLOOR), || format!("case {case}: infeasible {mu:?}"))?;
        let kkt = qp_kkt_violation(&gram, &a, &b, lambda, &mu);
        ensure(kkt <= 1e-6, || format!("case {case}: KKT violation {kkt:e}"))?;
        let f = qp_objective(&gram, &a, &b, lambda, &mu);
        for _ in 0..5 {
            let old: Vec<f64> = (0..m).map(|_| MU_FLOOR + r.gen_range(0.0..3.0)).collect();
            let f_old = qp_objective(&gram, &a, &b, lambda, &old);
            ensure(f <= f_old + 1e-12 * (1.0 + f_old.abs()), || {
                format!("case {case}: objective {f} above feasible point value {f_old}")
            })?;
        }
    }
    for case in 0..50 {
        let gram = random_psd(&mut r, 2, 2) + DMatrix::identity(2, 2) * 0.05;
        let a: Vec<f64> = (0..2).map(|_| r.gen_range(-1.0..2.0)).collect();
        let b: Vec<f64> = (0..2).map(|_| r.gen_range(-1.0..2.0)).collect();
        let lambda = r.gen_range(0.0..=1.0);
        let mu = solve_nonneg_qp(&gram, &a, &b, lambda, &opts).map_err(|e| e.to_string())?;
        let f = qp_objective(&gram, &a, &b, lambda, &mu);
        let hi = 2.0 * mu.iter().cloned().fold(1.0, f64::max);
        let steps = 400;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let p = [
                    MU_FLOOR + hi * i as f64 / steps as f64,
                    MU_FLOOR + hi * j as f64 / steps as f64,
                ];
                best = best.min(qp_objective(&gram, &a, &b, lambda, &p));
            }
        }
        ensure(f <= best + 1e-6, || format!("grid case {case}: solver {f} vs grid {best}"))?;
        ensure(best - f <= 1e-3 * (1.0 + f.abs()), || {
            format!("grid case {case}: grid {best} far above solver {f}")
        })?;
    }
    Ok(())
}

fn view_kernels(rng: &mut impl Rng, n: usize, views: usize) -> Vec<KernelMatrix> {
    (0..views)
        .map(|_| {
            let x = random_rows(rng, n, 2);
            quantum_kernel_matrix(&x, &random_params(rng, 1)).unwrap()
        })
        .collect()
}

/// Stage-2 weights stay on the simplex and both stages are bit-for-bit
/// reproducible.
pub fn simplex_and_determinism() -> Check {
    let mut r = rng(18);
    for case in 0..10 {
        let n = 16;
        let views = r.gen_range(2..=4);
        let kernels = view_kernels(&mut r, n, views);
        let labels = random_labels(&mut r, n);
        let config = TrainConfig { k2: 4, ..TrainConfig::default() };
        let init = WeightVector::uniform(views).unwrap();
        let s1 = train_weights(&kernels, &labels, &init, &config).map_err(|e| e.to_string())?;
        let eta = s1.eta();
        let sum: f64 = eta.iter().sum();
        ensure(eta.iter().all(|&e| e > 0.0) && (sum - 1.0).abs() <= 1e-12, || {
            format!("case {case}: η = {eta:?} not on the simplex")
        })?;
        let s2 = train_weights(&kernels, &labels, &init, &config).map_err(|e| e.to_string())?;
        ensure(s1.eta() == s2.eta() && s1.trace == s2.trace, || format!("case {case}: Stage 2 not reproducible"))?;
    }
    let x = random_rows(&mut r, 12, 2);
    let labels = random_labels(&mut r, 12);
    let init = random_params(&mut r, 2);
    let config = TrainConfig { k1: 4, batch_size: 5, t1: 5, eps1: 0.0, seed: 3, ..TrainConfig::default() };
    let a = train_base_kernel(&x, &labels, &init, &config, 1).map_err(|e| e.to_string())?;
    let b = train_base_kernel(&x, &labels, &init, &config, 1).map_err(|e| e.to_string())?;
    ensure(a.params == b.params && a.trace == b.trace, || "Stage 1 not reproducible".into())
}

/// Box and equality constraints of the dual, cached decision values, label
/// flip equivariance, and perfect training accuracy on the ideal kernel.
pub fn svm_properties() -> Check {
    let mut r = rng(19);
    for case in 0..30 {
        let n = r.gen_range(6..=30);
        let separable = case % 2 == 0;
        let labels = random_labels(&mut r, n);
        let x: Vec<Vec<f64>> = labels
            .iter()
            .map(|&y| {
                let shift = if separable { 2.0 * f64::from(y) } else { 0.0 };
                (0..2).map(|_| shift + r.gen_range(-1.0..1.0)).collect()
            })
            .collect();
        let (k, _) = gaussian_kernel_matrix(&x).map_err(|e| e.to_string())?;
        let c = [0.5, 1.0, 10.0][case % 3];
        let model = svm_fit(&k, &labels, &SvmParams::with_c(c)).map_err(|e| e.to_string())?;
        let alpha = model.alpha();
        ensure(alpha.iter().all(|&a| (-1e-12..=c + 1e-12).contains(&a)), || {
            format!("case {case}: α outside [0, {c}]")
        })?;
        let eq: f64 = alpha.iter().zip(&labels).map(|(a, &y)| a * f64::from(y)).sum();
        ensure(eq.abs() <= 1e-6, || format!("case {case}: Σ α y = {eq:e}"))?;
        ensure(model.kkt_violation() <= 1e-3, || format!("case {case}: KKT {}", model.kkt_violation()))?;
        let dec = model.decision_function(&k).map_err(|e| e.to_string())?;
        let cached = model.train_decision();
        let gap = dec.iter().zip(cached).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(gap <= 1e-12, || format!("case {case}: cached decision values differ by {gap:e}"))?;
        if separable {
            let acc = accuracy(&svm_predict(&model, &k).unwrap(), &labels).unwrap();
            ensure(acc == 1.0, || format!("case {case}: separable training accuracy {acc}"))?;
        }
        let flipped: Vec<i8> = labels.iter().map(|y| -y).collect();
        let fm = svm_fit(&k, &flipped, &SvmParams::with_c(c)).map_err(|e| e.to_string())?;
        let fdec = fm.decision_function(&k).map_err(|e| e.to_string())?;
        let gap = dec.iter().zip(&fdec).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        ensure(gap <= 1e-9, || format!("case {case}: flipped decision values off by {gap:e}"))?;

        let ideal = TargetKernel::new(&labels).unwrap().matrix();
        let im = svm_fit(&ideal, &labels, &SvmParams::default()).map_err(|e| e.to_string())?;
        let acc = accuracy(&svm_predict(&im, &ideal).unwrap(), &labels).unwrap();
        ensure(acc == 1.0, || format!("case {case}: ideal-kernel training accuracy {acc}"))?;
    }
    Ok(())
}

/// Every property check, in a fixed order.
pub fn property_suite() -> Vec<(&'static str, Check)> {
    vec![
        ("simulator norm and inverse", simulator_invariants()),
        ("ansatz gate counts", gate_count_formulas()),
        ("kernel symmetry/range/PSD", kernel_matrix_properties()),
        ("single-qubit cos² oracle", single_qubit_oracle()),
        ("kernel gradient vs finite differences", kernel_gradient_vs_fd()),
        ("HTA gradient vs finite differences", hta_gradient_vs_fd()),
        ("alignment examples", alignment_examples()),
        ("QP KKT and grid search", qp_properties()),
        ("simplex and determinism", simplex_and_determinism()),
        ("SVM feasibility and ideal kernel", svm_properties()),
    ]
}
