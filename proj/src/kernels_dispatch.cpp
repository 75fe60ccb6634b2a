#include "semicomp/kernels/backends.hpp"

#include <cstdlib>

#include "semicomp/errors.hpp"

namespace semicomp::kernels {

namespace {

const Backend* pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) return &avx2_backend();
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
    return &neon_backend();
#endif
    return &scalar_backend();
}

const Backend* resolve(const std::string& name) {
    if (name == "scalar") return &scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!avx2_supported()) throw ConfigError("kernel backend avx2 not supported on this CPU");
        return &avx2_backend();
    }
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
    if (name == "neon") return &neon_backend();
#endif
    if (name == "auto") return pick_auto();
    throw ConfigError("unknown kernel backend '" + name + "'");
}

const Backend*& active_slot() {
    static const Backend* active = nullptr;
    return active;
}

} // namespace

const Backend& backend() {
    const Backend*& active = active_slot();
    if (!active) {
        const char* env = std::getenv("SEMICOMP_KERNELS");
        active = env ? resolve(env) : pick_auto();
    }
    return *active;
}

void set_backend(const std::string& name) { active_slot() = resolve(name); }

std::vector<std::string> available_backends() {
    std::vector<std::string> v{"scalar"};
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) v.push_back("avx2");
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
    v.push_back("neon");
#endif
    return v;
}

namespace {

// Fixed reduction tree over backend blocks: per-block partial sums, then
// pairwise combination of the block results.  Identical for every backend by
// construction.
template <typename BlockFn, typename... Args>
double block_pairwise(BlockFn fn, std::size_t n, Args... arrays) {
    if (n <= kBlock) return fn(arrays..., n);
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t off = b * kBlock;
        const std::size_t len = (off + kBlock <= n) ? kBlock : n - off;
        partial[b] = fn((arrays + off)..., len);
    }
    std::size_t m = nb;
    while (m > 1) {
        const std::size_t half = m / 2;
        for (std::size_t i = 0; i < half; ++i) partial[i] = partial[2 * i] + partial[2 * i + 1];
        if (m % 2 == 1) partial[half] = partial[m - 1];
        m = half + (m % 2);
    }
    return partial[0];
}

} // namespace

double sum(std::span<const double> x) {
    return block_pairwise(backend().block_sum, x.size(), x.data());
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("kernels::dot: length mismatch");
    return block_pairwise(backend().block_dot, x.size(), x.data(), y.data());
}

void euler_update(std::span<double> state, std::span<const double> z, double drift,
                  double vol) {
    if (state.size() != z.size()) throw DataError("kernels::euler_update: length mismatch");
    backend().euler_update(state.data(), z.data(), drift, vol, state.size());
}

void cmul_inplace(std::span<std::complex<double>> a, std::span<const std::complex<double>> b) {
    if (a.size() != b.size()) throw DataError("kernels::cmul_inplace: length mismatch");
    backend().cmul_inplace(a.data(), b.data(), a.size());
}

} // namespace semicomp::kernels
