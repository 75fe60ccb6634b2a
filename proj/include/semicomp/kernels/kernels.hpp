#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace semicomp::kernels {

// Data-parallel inner kernels with runtime-dispatched backends (scalar
// reference, AVX2, NEON).  All backends are required to be bit-identical:
//
//  * every elementwise kernel performs the same IEEE op sequence per lane
//    (no FMA contraction; the build sets -ffp-contract=off),
//  * reductions use a fixed tree: blocks of kBlock elements, four interleaved
//    accumulators inside a block (lane j takes elements 4i+j), block results
//    combined pairwise.  The scalar reference implements the identical tree.
//
// Results therefore do not depend on which backend the dispatcher picks.

inline constexpr std::size_t kBlock = 1024;

struct Backend {
    const char* name;
    // Sum / dot over a single block (n <= kBlock) with the 4-lane layout.
    double (*block_sum)(const double* x, std::size_t n);
    double (*block_dot)(const double* x, const double* y, std::size_t n);
    // state[i] = (state[i] + drift) + vol * z[i]
    void (*euler_update)(double* state, const double* z, double drift, double vol,
                         std::size_t n);
    // a[i] *= b[i] (complex), textbook formula per lane.
    void (*cmul_inplace)(std::complex<double>* a, const std::complex<double>* b,
                         std::size_t n);
};

// Active backend (auto-selected at first use; SEMICOMP_KERNELS=scalar|avx2|neon
// overrides).  set_backend throws ConfigError if the request is unavailable.
const Backend& backend();
void set_backend(const std::string& name); // "auto" re-enables detection
std::vector<std::string> available_backends();

// Public entry points (fixed reduction tree applied over backend blocks).
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
inline double sum_sq(std::span<const double> x) { return dot(x, x); }
void euler_update(std::span<double> state, std::span<const double> z, double drift,
                  double vol);
void cmul_inplace(std::span<std::complex<double>> a, std::span<const std::complex<double>> b);

} // namespace semicomp::kernels
