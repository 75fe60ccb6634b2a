#include "semicomp/kernels/backends.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace semicomp::kernels {

namespace {

// AVX2 variants.  Lane j of the accumulator register holds exactly the
// scalar reference's accumulator a_j; only mul/add/sub intrinsics are used
// (no FMA), so each lane performs the reference op sequence bit-for-bit.

double v_block_sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i];
    return ((lanes[0] + lanes[2]) + (lanes[1] + lanes[3])) + tail;
}

double v_block_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (; i < n4; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    return ((lanes[0] + lanes[2]) + (lanes[1] + lanes[3])) + tail;
}

void v_euler_update(double* state, const double* z, double drift, double vol,
                    std::size_t n) {
    const __m256d vd = _mm256_set1_pd(drift);
    const __m256d vv = _mm256_set1_pd(vol);
    std::size_t i = 0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (; i < n4; i += 4) {
        __m256d s = _mm256_loadu_pd(state + i);
        __m256d zz = _mm256_loadu_pd(z + i);
        s = _mm256_add_pd(_mm256_add_pd(s, vd), _mm256_mul_pd(vv, zz));
        _mm256_storeu_pd(state + i, s);
    }
    for (; i < n; ++i) state[i] = (state[i] + drift) + vol * z[i];
}

void v_cmul_inplace(std::complex<double>* a, const std::complex<double>* b,
                    std::size_t n) {
    double* ad = reinterpret_cast<double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    std::size_t i = 0;
    const std::size_t n2 = n & ~std::size_t(1);
    for (; i < n2; i += 2) {
        __m256d va = _mm256_loadu_pd(ad + 2 * i);
        __m256d vb = _mm256_loadu_pd(bd + 2 * i);
        __m256d t0 = _mm256_mul_pd(va, _mm256_movedup_pd(vb));            // ar*br | ai*br
        __m256d bim = _mm256_permute_pd(vb, 0xF);                         // bi | bi
        __m256d t1 = _mm256_mul_pd(_mm256_permute_pd(va, 0x5), bim);      // ai*bi | ar*bi
        _mm256_storeu_pd(ad + 2 * i, _mm256_addsub_pd(t0, t1));
    }
    for (; i < n; ++i) {
        const double ar = ad[2 * i], ai = ad[2 * i + 1];
        const double br = bd[2 * i], bi = bd[2 * i + 1];
        ad[2 * i] = ar * br - ai * bi;
        ad[2 * i + 1] = ai * br + ar * bi;
    }
}

} // namespace

const Backend& avx2_backend() {
    static const Backend b{"avx2", v_block_sum, v_block_dot, v_euler_update,
                           v_cmul_inplace};
    return b;
}

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

} // namespace semicomp::kernels

#endif
