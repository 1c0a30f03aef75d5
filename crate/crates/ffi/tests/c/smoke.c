#include <math.h>
#include <stdio.h>
#include "qmvkl.h"

int main(void) {
    const double x[3] = {0.0, 0.5, 1.0};
    const double theta[2] = {0.3, 0.7};
    QmvklKernel *k = NULL;
    if (qmvkl_quantum_kernel(x, 3, 1, theta, 1, &k) != QMVKL_STATUS_OK) {
        fprintf(stderr, "kernel: %s\n", qmvkl_last_error());
        return 1;
    }
    size_t n = 0;
    double buf[9];
    if (qmvkl_kernel_size(k, &n) != QMVKL_STATUS_OK || n != 3 ||
        qmvkl_kernel_copy(k, buf, 9) != QMVKL_STATUS_OK) {
        return 2;
    }
    double c = cos(0.25);
    if (fabs(buf[1] - c * c) > 1e-12) {
        return 3;
    }
    if (qmvkl_kernel_copy(NULL, buf, 9) != QMVKL_STATUS_NULL_POINTER || qmvkl_last_error() == NULL) {
        return 4;
    }
    qmvkl_kernel_free(k);
    printf("ok %s\n", qmvkl_version());
    return 0;
}
