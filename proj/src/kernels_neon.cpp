#include "semicomp/kernels/backends.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace semicomp::kernels {

namespace {

// NEON variants.  Two 128-bit registers emulate the 4-lane accumulator block
// (acc01 holds reference lanes 0/1, acc23 lanes 2/3); only mul/add are used,
// never vfmaq, so lanes match the scalar reference bit-for-bit.

double v_block_sum(const double* x, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (; i < n4; i += 4) {
        acc01 = vaddq_f64(acc01, vld1q_f64(x + i));
        acc23 = vaddq_f64(acc23, vld1q_f64(x + i + 2));
    }
    const double a0 = vgetq_lane_f64(acc01, 0), a1 = vgetq_lane_f64(acc01, 1);
    const double a2 = vgetq_lane_f64(acc23, 0), a3 = vgetq_lane_f64(acc23, 1);
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i];
    return ((a0 + a2) + (a1 + a3)) + tail;
}

double v_block_dot(const double* x, const double* y, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (; i < n4; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
        acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
    }
    const double a0 = vgetq_lane_f64(acc01, 0), a1 = vgetq_lane_f64(acc01, 1);
    const double a2 = vgetq_lane_f64(acc23, 0), a3 = vgetq_lane_f64(acc23, 1);
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    return ((a0 + a2) + (a1 + a3)) + tail;
}

void v_euler_update(double* state, const double* z, double drift, double vol,
                    std::size_t n) {
    const float64x2_t vd = vdupq_n_f64(drift);
    const float64x2_t vv = vdupq_n_f64(vol);
    std::size_t i = 0;
    const std::size_t n2 = n & ~std::size_t(1);
    for (; i < n2; i += 2) {
        float64x2_t s = vld1q_f64(state + i);
        float64x2_t zz = vld1q_f64(z + i);
        s = vaddq_f64(vaddq_f64(s, vd), vmulq_f64(vv, zz));
        vst1q_f64(state + i, s);
    }
    for (; i < n; ++i) state[i] = (state[i] + drift) + vol * z[i];
}

void v_cmul_inplace(std::complex<double>* a, const std::complex<double>* b,
                    std::size_t n) {
    double* ad = reinterpret_cast<double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    // Sign mask flips lane 0 only: x + (-y) is bitwise x - y in IEEE.
    const uint64x2_t signmask = {0x8000000000000000ull, 0ull};
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t va = vld1q_f64(ad + 2 * i);                      // [ar, ai]
        float64x2_t vb = vld1q_f64(bd + 2 * i);                      // [br, bi]
        float64x2_t t0 = vmulq_f64(va, vdupq_laneq_f64(vb, 0));      // [ar*br, ai*br]
        float64x2_t va_swap = vextq_f64(va, va, 1);                  // [ai, ar]
        float64x2_t t1 = vmulq_f64(va_swap, vdupq_laneq_f64(vb, 1)); // [ai*bi, ar*bi]
        t1 = vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(t1), signmask));
        vst1q_f64(ad + 2 * i, vaddq_f64(t0, t1));
    }
}

} // namespace

const Backend& neon_backend() {
    static const Backend b{"neon", v_block_sum, v_block_dot, v_euler_update,
                           v_cmul_inplace};
    return b;
}

} // namespace semicomp::kernels

#endif
