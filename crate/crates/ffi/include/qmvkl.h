#ifndef QMVKL_H
#define QMVKL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum QmvklStatus {
  QMVKL_STATUS_OK = 0,
  // A required pointer argument was `NULL`.
  QMVKL_STATUS_NULL_POINTER = 1,
  // Sizes, labels, parameters or configuration were rejected.
  QMVKL_STATUS_INVALID_ARGUMENT = 2,
  // A numerical routine failed (divergence, degenerate kernels, ...).
  QMVKL_STATUS_NUMERIC = 3,
  // Reading or writing files failed.
  QMVKL_STATUS_IO = 4,
  // The library panicked; the message holds the panic payload.
  QMVKL_STATUS_PANIC = 5,
} QmvklStatus;

// Kernel matrix owned by the library.
typedef struct QmvklKernel QmvklKernel;

// Fitted SVM owned by the library.
typedef struct QmvklSvm QmvklSvm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or `NULL` after a
// successful call. The pointer stays valid until the next call.
const char *qmvkl_last_error(void);

// Library version as a static NUL-terminated string.
const char *qmvkl_version(void);

// Quantum kernel matrix of `n` samples of dimension `d` (one qubit per
// feature). `theta` holds `2 * depth` values: the betas, then the gammas.
//
// # Safety
// `x` must hold `n * d` values, `theta` `2 * depth` values, and `out` must
// be writable.
enum QmvklStatus qmvkl_quantum_kernel(const double *x,
                                      size_t n,
                                      size_t d,
                                      const double *theta,
                                      size_t depth,
                                      struct QmvklKernel **out);

// Gaussian kernel matrix with bandwidth equal to the mean pairwise
// distance, which is written to `sigma` when it is non-null.
//
// # Safety
// `x` must hold `n * d` values and `out` must be writable.
enum QmvklStatus qmvkl_gaussian_kernel(const double *x,
                                       size_t n,
                                       size_t d,
                                       double *sigma,
                                       struct QmvklKernel **out);

// Wraps a caller-supplied row-major `n * n` matrix.
//
// # Safety
// `values` must hold `n * n` values and `out` must be writable.
enum QmvklStatus qmvkl_kernel_from_values(const double *values, size_t n, struct QmvklKernel **out);

// Number of rows (and columns) of a kernel.
//
// # Safety
// `kernel` must be a live handle and `n` writable.
enum QmvklStatus qmvkl_kernel_size(const struct QmvklKernel *kernel, size_t *n);

// Copies the kernel into `buffer` in row-major order; `len` must be at
// least `n * n`.
//
// # Safety
// `kernel` must be a live handle and `buffer` must hold `len` values.
enum QmvklStatus qmvkl_kernel_copy(const struct QmvklKernel *kernel, double *buffer, size_t len);

// Releases a kernel handle.
//
// # Safety
// `kernel` must be `NULL` or a handle not yet freed.
void qmvkl_kernel_free(struct QmvklKernel *kernel);

// Global kernel-target alignment against `±1` labels.
//
// # Safety
// `kernel` must be a live handle, `y` must hold `n` labels and `out` be
// writable.
enum QmvklStatus qmvkl_target_alignment(const struct QmvklKernel *kernel,
                                        const int8_t *y,
                                        size_t n,
                                        double *out);

// Hybrid alignment `(1-λ)·LTA + λ·TA` with neighbourhoods of size `k`
// (anchor included) taken from Euclidean distances between the rows of
// `x` (`n * d` values).
//
// # Safety
// `kernel` must be a live handle, `x` must hold `n * d` values, `y` `n`
// labels, and `out` be writable.
enum QmvklStatus qmvkl_hybrid_alignment(const struct QmvklKernel *kernel,
                                        const double *x,
                                        size_t d,
                                        const int8_t *y,
                                        size_t n,
                                        size_t k,
                                        double lambda,
                                        double *out);

// Fits a C-SVC on a precomputed training kernel.
//
// # Safety
// `kernel` must be a live handle, `y` must hold one label per kernel row,
// and `out` must be writable.
enum QmvklStatus qmvkl_svm_fit(const struct QmvklKernel *kernel,
                               const int8_t *y,
                               size_t n,
                               double c,
                               struct QmvklSvm **out);

// Predicts `rows` labels from a row-major `rows * cols` cross kernel whose
// columns are the training samples.
//
// # Safety
// `model` must be a live handle, `cross` must hold `rows * cols` values and
// `out` must hold `rows` labels.
enum QmvklStatus qmvkl_svm_predict(const struct QmvklSvm *model,
                                   const double *cross,
                                   size_t rows,
                                   size_t cols,
                                   int8_t *out);

// Releases an SVM handle.
//
// # Safety
// `model` must be `NULL` or a handle not yet freed.
void qmvkl_svm_free(struct QmvklSvm *model);

// Runs the experiment described by `key = value` lines (the same keys as
// the command-line configuration file) and writes the report as a JSON
// string to `out`. Release it with [`qmvkl_string_free`].
//
// # Safety
// `config` must be a NUL-terminated string and `out` writable.
enum QmvklStatus qmvkl_run_experiment(const char *config, char **out);

// Releases a string returned by the library.
//
// # Safety
// `s` must be `NULL` or a string from this library not yet freed.
void qmvkl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMVKL_H */
