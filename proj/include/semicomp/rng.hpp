#pragma once

#include <array>
#include <cstdint>

namespace semicomp {

// Philox4x32-10 block cipher (Salmon, Moraes, Dror, Shaw 2011).  Counter-based:
// the stream for path i under master seed s is philox(key = s, counter =
// (i, block)).  Path draws therefore depend only on (seed, path index) and are
// independent of the total path count and of any thread schedule.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& ctr,
                                              const std::array<std::uint32_t, 2>& key);
};

// Per-path stream of uniforms / normals / Poisson counts.
class PathStream {
  public:
    PathStream(std::uint64_t seed, std::uint64_t path);

    std::uint64_t next_u64();
    // Uniform on (0,1), 53-bit mantissa, never exactly 0 or 1.
    double next_u01();
    // Standard normal by inversion (AS 241).
    double next_normal();
    // Poisson(mu) by CDF inversion; exact for the moderate means used here.
    std::uint64_t next_poisson(double mu);

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> path_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

} // namespace semicomp
