#include "semicomp/kernels/backends.hpp"

namespace semicomp::kernels {

namespace {

// Reference implementations.  The 4-lane interleaved accumulation mirrors a
// 256-bit vector register lane-for-lane; vector backends must reproduce this
// exact addition order.

double s_block_sum(const double* x, std::size_t n) {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t i = 0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (; i < n4; i += 4) {
        a0 += x[i];
        a1 += x[i + 1];
        a2 += x[i + 2];
        a3 += x[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i];
    return ((a0 + a2) + (a1 + a3)) + tail;
}

double s_block_dot(const double* x, const double* y, std::size_t n) {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t i = 0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (; i < n4; i += 4) {
        a0 += x[i] * y[i];
        a1 += x[i + 1] * y[i + 1];
        a2 += x[i + 2] * y[i + 2];
        a3 += x[i + 3] * y[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    return ((a0 + a2) + (a1 + a3)) + tail;
}

void s_euler_update(double* state, const double* z, double drift, double vol,
                    std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) state[i] = (state[i] + drift) + vol * z[i];
}

void s_cmul_inplace(std::complex<double>* a, const std::complex<double>* b,
                    std::size_t n) {
    double* ad = reinterpret_cast<double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = ad[2 * i], ai = ad[2 * i + 1];
        const double br = bd[2 * i], bi = bd[2 * i + 1];
        ad[2 * i] = ar * br - ai * bi;
        ad[2 * i + 1] = ar * bi + ai * br;
    }
}

} // namespace

const Backend& scalar_backend() {
    static const Backend b{"scalar", s_block_sum, s_block_dot, s_euler_update,
                           s_cmul_inplace};
    return b;
}

} // namespace semicomp::kernels
