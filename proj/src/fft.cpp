#include "semicomp/fft.hpp"

#include <cmath>

#include "semicomp/errors.hpp"

namespace semicomp {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft(std::complex<double>* a, std::size_t n, bool inverse) {
    if (!is_pow2(n)) throw ConfigError("fft: length must be a power of two");
    if (n == 1) return;

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // Twiddle table w[k] = exp(sign * i * 2 pi k / n), k < n/2.
    static thread_local std::vector<std::complex<double>> tw;
    static thread_local std::size_t tw_n = 0;
    static thread_local bool tw_inv = false;
    if (tw_n != n || tw_inv != inverse) {
        tw.resize(n / 2);
        const double sign = inverse ? 1.0 : -1.0;
        const double step = sign * 2.0 * 3.14159265358979323846 / double(n);
        for (std::size_t k = 0; k < n / 2; ++k)
            tw[k] = std::complex<double>(std::cos(step * double(k)), std::sin(step * double(k)));
        tw_n = n;
        tw_inv = inverse;
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w = tw[k * stride];
                std::complex<double>& u = a[i + k];
                std::complex<double>& v = a[i + k + len / 2];
                // Spelled-out complex multiply: keeps every backend of the
                // butterfly on the same mul/add sequence (no __muldc3, no FMA).
                const double vr = v.real() * w.real() - v.imag() * w.imag();
                const double vi = v.real() * w.imag() + v.imag() * w.real();
                const double ur = u.real(), ui = u.imag();
                u = {ur + vr, ui + vi};
                v = {ur - vr, ui - vi};
            }
        }
    }

    if (inverse) {
        const double s = 1.0 / double(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= s;
    }
}

} // namespace semicomp
