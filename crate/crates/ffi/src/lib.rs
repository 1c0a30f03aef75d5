//! C interface to the `qmvkl` library.
//!
//! Every function returns a [`QmvklStatus`]. On failure the message is
//! available from [`qmvkl_last_error`] on the same thread until the next
//! call. Matrices are dense row-major `double` buffers. Handles are opaque
//! and released with their `_free` function; freeing `NULL` is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use qmvkl::alignment::{hybrid_alignment, knn_by_distance, target_alignment, AnchorPolicy, TargetKernel};
use qmvkl::experiment::{run_pipeline, ExperimentConfig};
use qmvkl::kernel::{gaussian_kernel_matrix, quantum_kernel_matrix, KernelMatrix};
use qmvkl::qsim::AnsatzParams;
use qmvkl::svm::{svm_fit, svm_predict, SvmModel, SvmParams};
use qmvkl::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmvklStatus {
    Ok = 0,
    /// A required pointer argument was `NULL`.
    NullPointer = 1,
    /// Sizes, labels, parameters or configuration were rejected.
    InvalidArgument = 2,
    /// A numerical routine failed (divergence, degenerate kernels, ...).
    Numeric = 3,
    /// Reading or writing files failed.
    Io = 4,
    /// The library panicked; the message holds the panic payload.
    Panic = 5,
}

/// Kernel matrix owned by the library.
pub struct QmvklKernel {
    matrix: KernelMatrix,
}

/// Fitted SVM owned by the library.
pub struct QmvklSvm {
    model: SvmModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(QmvklStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let root = match &e {
            Error::Repeat { source, .. } => source.as_ref(),
            other => other,
        };
        let status = match root {
            Error::Io { .. } | Error::Format { .. } => QmvklStatus::Io,
            Error::Diverged { .. }
            | Error::NotPsd { .. }
            | Error::QpNotConverged { .. }
            | Error::DegenerateKernels { .. }
            | Error::DegenerateBandwidth
            | Error::ZeroKernel
            | Error::RankDeficient { .. } => QmvklStatus::Numeric,
            _ => QmvklStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(QmvklStatus::InvalidArgument, message.into())
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QmvklStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QmvklStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {message}"));
            QmvklStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(QmvklStatus::NullPointer, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must point to `len` readable values when non-null.
unsafe fn view<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(slice::from_raw_parts(p, len))
}

/// # Safety
/// `x` must point to `rows * cols` values.
unsafe fn matrix_rows(x: *const f64, rows: usize, cols: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let total = rows.checked_mul(cols).ok_or_else(|| invalid("matrix size overflows"))?;
    let data = view(x, total, "x")?;
    Ok(data.chunks(cols.max(1)).take(rows).map(<[f64]>::to_vec).collect())
}

/// # Safety
/// `out` must be a valid pointer to write a handle into.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    non_null(out, "out")?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or `NULL` after a
/// successful call. The pointer stays valid until the next call.
#[no_mangle]
pub extern "C" fn qmvkl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qmvkl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Quantum kernel matrix of `n` samples of dimension `d` (one qubit per
/// feature). `theta` holds `2 * depth` values: the betas, then the gammas.
///
/// # Safety
/// `x` must hold `n * d` values, `theta` `2 * depth` values, and `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_quantum_kernel(
    x: *const f64,
    n: usize,
    d: usize,
    theta: *const f64,
    depth: usize,
    out: *mut *mut QmvklKernel,
) -> QmvklStatus {
    guard(|| {
        let rows = matrix_rows(x, n, d)?;
        let theta = view(theta, 2 * depth, "theta")?;
        let params = AnsatzParams::from_slice(theta)?;
        let matrix = quantum_kernel_matrix(&rows, &params)?;
        emit(out, QmvklKernel { matrix })
    })
}

/// Gaussian kernel matrix with bandwidth equal to the mean pairwise
/// distance, which is written to `sigma` when it is non-null.
///
/// # Safety
/// `x` must hold `n * d` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_gaussian_kernel(
    x: *const f64,
    n: usize,
    d: usize,
    sigma: *mut f64,
    out: *mut *mut QmvklKernel,
) -> QmvklStatus {
    guard(|| {
        let rows = matrix_rows(x, n, d)?;
        let (matrix, s) = gaussian_kernel_matrix(&rows)?;
        if !sigma.is_null() {
            *sigma = s;
        }
        emit(out, QmvklKernel { matrix })
    })
}

/// Wraps a caller-supplied row-major `n * n` matrix.
///
/// # Safety
/// `values` must hold `n * n` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_kernel_from_values(
    values: *const f64,
    n: usize,
    out: *mut *mut QmvklKernel,
) -> QmvklStatus {
    guard(|| {
        let rows = matrix_rows(values, n, n)?;
        let matrix = KernelMatrix::from_rows(&rows)?;
        emit(out, QmvklKernel { matrix })
    })
}

/// Number of rows (and columns) of a kernel.
///
/// # Safety
/// `kernel` must be a live handle and `n` writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_kernel_size(kernel: *const QmvklKernel, n: *mut usize) -> QmvklStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(n, "n")?;
        *n = (*kernel).matrix.nrows();
        Ok(())
    })
}

/// Copies the kernel into `buffer` in row-major order; `len` must be at
/// least `n * n`.
///
/// # Safety
/// `kernel` must be a live handle and `buffer` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_kernel_copy(kernel: *const QmvklKernel, buffer: *mut f64, len: usize) -> QmvklStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(buffer, "buffer")?;
        let m = &(*kernel).matrix;
        let (r, c) = m.shape();
        if len < r * c {
            return Err(invalid(format!("buffer holds {len} values, {} needed", r * c)));
        }
        let out = slice::from_raw_parts_mut(buffer, r * c);
        for i in 0..r {
            for j in 0..c {
                out[i * c + j] = m.get(i, j);
            }
        }
        Ok(())
    })
}

/// Releases a kernel handle.
///
/// # Safety
/// `kernel` must be `NULL` or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_kernel_free(kernel: *mut QmvklKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

unsafe fn labels<'a>(y: *const i8, n: usize) -> Result<&'a [i8], Failure> {
    view(y, n, "labels")
}

/// Global kernel-target alignment against `±1` labels.
///
/// # Safety
/// `kernel` must be a live handle, `y` must hold `n` labels and `out` be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_target_alignment(
    kernel: *const QmvklKernel,
    y: *const i8,
    n: usize,
    out: *mut f64,
) -> QmvklStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        let target = TargetKernel::new(labels(y, n)?)?;
        *out = target_alignment(&(*kernel).matrix, &target)?;
        Ok(())
    })
}

/// Hybrid alignment `(1-λ)·LTA + λ·TA` with neighbourhoods of size `k`
/// (anchor included) taken from Euclidean distances between the rows of
/// `x` (`n * d` values).
///
/// # Safety
/// `kernel` must be a live handle, `x` must hold `n * d` values, `y` `n`
/// labels, and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_hybrid_alignment(
    kernel: *const QmvklKernel,
    x: *const f64,
    d: usize,
    y: *const i8,
    n: usize,
    k: usize,
    lambda: f64,
    out: *mut f64,
) -> QmvklStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(invalid(format!("lambda {lambda} outside [0, 1]")));
        }
        let rows = matrix_rows(x, n, d)?;
        let target = TargetKernel::new(labels(y, n)?)?;
        let nb = knn_by_distance(&rows, k, AnchorPolicy::Include)?;
        *out = hybrid_alignment(&(*kernel).matrix, &target, &nb, lambda)?;
        Ok(())
    })
}

/// Fits a C-SVC on a precomputed training kernel.
///
/// # Safety
/// `kernel` must be a live handle, `y` must hold one label per kernel row,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_svm_fit(
    kernel: *const QmvklKernel,
    y: *const i8,
    n: usize,
    c: f64,
    out: *mut *mut QmvklSvm,
) -> QmvklStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        let model = svm_fit(&(*kernel).matrix, labels(y, n)?, &SvmParams::with_c(c))?;
        emit(out, QmvklSvm { model })
    })
}

/// Predicts `rows` labels from a row-major `rows * cols` cross kernel whose
/// columns are the training samples.
///
/// # Safety
/// `model` must be a live handle, `cross` must hold `rows * cols` values and
/// `out` must hold `rows` labels.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_svm_predict(
    model: *const QmvklSvm,
    cross: *const f64,
    rows: usize,
    cols: usize,
    out: *mut i8,
) -> QmvklStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let k = KernelMatrix::from_rows(&matrix_rows(cross, rows, cols)?)?;
        let pred = svm_predict(&(*model).model, &k)?;
        slice::from_raw_parts_mut(out, rows).copy_from_slice(&pred);
        Ok(())
    })
}

/// Releases an SVM handle.
///
/// # Safety
/// `model` must be `NULL` or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_svm_free(model: *mut QmvklSvm) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs the experiment described by `key = value` lines (the same keys as
/// the command-line configuration file) and writes the report as a JSON
/// string to `out`. Release it with [`qmvkl_string_free`].
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_run_experiment(config: *const c_char, out: *mut *mut c_char) -> QmvklStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|_| invalid("configuration is not UTF-8"))?;
        let c = ExperimentConfig::from_text(text)?;
        c.validate()?;
        let json = run_pipeline(&c)?.to_json()?;
        *out = CString::new(json).map_err(|_| invalid("report contains NUL"))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be `NULL` or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qmvkl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
