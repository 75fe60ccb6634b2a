#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace semicomp {

// In-place iterative radix-2 FFT, n a power of two.  Forward transform uses
// the e^{-i 2 pi jk / n} convention; the inverse applies the 1/n factor.
// Twiddles come from a per-call table (no multiplicative drift), so results
// are reproducible run to run.
void fft(std::complex<double>* a, std::size_t n, bool inverse);

inline void fft(std::vector<std::complex<double>>& a, bool inverse) {
    fft(a.data(), a.size(), inverse);
}

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

} // namespace semicomp
