#include "semicomp/rng.hpp"

#include <cmath>

#include "semicomp/errors.hpp"
#include "semicomp/normal.hpp"

namespace semicomp {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}
} // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& ctr,
                                               const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = ctr;
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kW0;
        k1 += kW1;
    }
    return c;
}

PathStream::PathStream(std::uint64_t seed, std::uint64_t path)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      path_{std::uint32_t(path), std::uint32_t(path >> 32)} {}

void PathStream::refill() {
    std::array<std::uint32_t, 4> ctr = {std::uint32_t(block_), std::uint32_t(block_ >> 32),
                                        path_[0], path_[1]};
    buf_ = Philox4x32::block(ctr, key_);
    ++block_;
    pos_ = 0;
}

std::uint64_t PathStream::next_u64() {
    if (pos_ > 2) refill();
    std::uint64_t v = (std::uint64_t(buf_[pos_]) << 32) | std::uint64_t(buf_[pos_ + 1]);
    pos_ += 2;
    return v;
}

double PathStream::next_u01() {
    // 53 significant bits, offset keeps the value strictly inside (0,1).
    return double(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double PathStream::next_normal() { return norm_ppf(next_u01()); }

std::uint64_t PathStream::next_poisson(double mu) {
    if (mu < 0.0) throw DataError("next_poisson: negative mean");
    if (mu == 0.0) return 0;
    if (mu > 700.0) throw DataError("next_poisson: mean too large for inversion");
    double u = next_u01();
    double p = std::exp(-mu);
    double cdf = p;
    std::uint64_t k = 0;
    const std::uint64_t cap = std::uint64_t(10.0 * mu) + 100;
    while (u > cdf && k < cap) {
        ++k;
        p *= mu / double(k);
        cdf += p;
    }
    return k;
}

} // namespace semicomp
