#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"

#include "semicomp/errors.hpp"
#include "semicomp/grid.hpp"
#include "semicomp/normal.hpp"
#include "semicomp/quadrature.hpp"
#include "semicomp/rng.hpp"

#include "support/oracles.hpp"

using namespace semicomp;

TEST_SUITE("support") {

    TEST_CASE("philox4x32-10 known-answer vectors") {
        // Published test vectors for the Philox4x32-10 cipher (counter, key ->
        // output), frozen here as the ground truth for the stream generator.
        const std::array<std::uint32_t, 4> zero_ctr{0u, 0u, 0u, 0u};
        const std::array<std::uint32_t, 2> zero_key{0u, 0u};
        const auto r0 = Philox4x32::block(zero_ctr, zero_key);
        CHECK(r0[0] == 0x6627e8d5u);
        CHECK(r0[1] == 0xe169c58du);
        CHECK(r0[2] == 0xbc57ac4cu);
        CHECK(r0[3] == 0x9b00dbd8u);

        const std::array<std::uint32_t, 4> ff_ctr{0xffffffffu, 0xffffffffu, 0xffffffffu,
                                                  0xffffffffu};
        const std::array<std::uint32_t, 2> ff_key{0xffffffffu, 0xffffffffu};
        const auto r1 = Philox4x32::block(ff_ctr, ff_key);
        CHECK(r1[0] == 0x408f276du);
        CHECK(r1[1] == 0x41c83b0eu);
        CHECK(r1[2] == 0xa20bc7c6u);
        CHECK(r1[3] == 0x6d5451fdu);

        const std::array<std::uint32_t, 4> pi_ctr{0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                                  0x03707344u};
        const std::array<std::uint32_t, 2> pi_key{0xa4093822u, 0x299f31d0u};
        const auto r2 = Philox4x32::block(pi_ctr, pi_key);
        CHECK(r2[0] == 0xd16cfe09u);
        CHECK(r2[1] == 0x94fdccebu);
        CHECK(r2[2] == 0x5001e420u);
        CHECK(r2[3] == 0x24126ea1u);
    }

    TEST_CASE("path streams are independent of draw interleaving") {
        PathStream a(42, 7);
        std::vector<double> first;
        for (int i = 0; i < 16; ++i) first.push_back(a.next_u01());
        PathStream b(42, 7);
        for (int i = 0; i < 16; ++i) CHECK(b.next_u01() == first[i]);
        // a different path index gives an unrelated stream
        PathStream c(42, 8);
        int same = 0;
        for (int i = 0; i < 16; ++i)
            if (c.next_u01() == first[std::size_t(i)]) ++same;
        CHECK(same == 0);
    }

    TEST_CASE("u01 range and determinism across seeds") {
        PathStream s(20260814, 0);
        for (int i = 0; i < 1000; ++i) {
            const double u = s.next_u01();
            CHECK(u > 0.0);
            CHECK(u < 1.0);
        }
    }

    TEST_CASE("normal pdf/cdf against closed-form values") {
        CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
        CHECK(norm_pdf(1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
        CHECK(norm_pdf(2.0) == doctest::Approx(0.05399096651318806).epsilon(1e-14));
        CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
        // 1 - Phi(1.96) = 0.024997895148220435 (standard table value)
        CHECK(norm_cdf(1.96) == doctest::Approx(1.0 - 0.024997895148220435).epsilon(1e-12));
        CHECK(norm_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-9));
    }

    TEST_CASE("norm_ppf inverts norm_cdf to near machine precision") {
        for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.975, 1.0 - 1e-6}) {
            const double x = norm_ppf(p);
            CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-11));
        }
        CHECK(norm_ppf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
        CHECK(norm_ppf(0.5) == doctest::Approx(0.0));
    }

    TEST_CASE("poisson inversion matches the pmf recursion") {
        // Frequency check against exact CDF: P(N <= k) for mu = 3.5.
        const double mu = 3.5;
        PathStream s(7, 3);
        const int n = 20000;
        std::vector<int> counts(40, 0);
        for (int i = 0; i < n; ++i) {
            const std::uint64_t k = s.next_poisson(mu);
            REQUIRE(k < counts.size());
            ++counts[std::size_t(k)];
        }
        double pmf = std::exp(-mu);
        for (std::size_t k = 0; k < 12; ++k) {
            const double freq = double(counts[k]) / n;
            const double se = std::sqrt(pmf * (1.0 - pmf) / n);
            CHECK(std::fabs(freq - pmf) < 5.0 * se + 1e-4);
            pmf *= mu / double(k + 1);
        }
        CHECK_THROWS_AS((void)s.next_poisson(701.0), DataError);
    }

    TEST_CASE("gauss-legendre integrates polynomials exactly") {
        // degree 2n-1 exactness
        // f(x) = 8 x^7 + 3 x^6 + x^4; integral over [1,2] = 255 + 3*127/7 + 31/5
        const auto f7 = [](double x) { return ((8 * x + 3) * x * x + 1) * x * x * x * x; };
        const double exact = 255.0 + 3.0 * 127.0 / 7.0 + 31.0 / 5.0;
        CHECK(gl_integrate(f7, 1.0, 2.0, 4) == doctest::Approx(exact).epsilon(1e-14));
        CHECK(gl_integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 16) ==
              doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    }

    TEST_CASE("log-panel quadrature handles power singularities") {
        // integral_{1e-8}^{1} x^{-1/2} dx = 2 (1 - 1e-4)
        const double v = gl_integrate_log([](double x) { return 1.0 / std::sqrt(x); }, 1e-8,
                                          1.0, 24, 16);
        CHECK(v == doctest::Approx(2.0 * (1.0 - 1e-4)).epsilon(1e-12));
    }

    TEST_CASE("uniform grid indexing") {
        UniformGrid g;
        g.lo = -1.0;
        g.h = 0.25;
        g.n = 9;
        CHECK(g.hi() == doctest::Approx(1.0));
        CHECK(g[4] == doctest::Approx(0.0));
        CHECK(g.cell(-2.0) == 0);          // clamped
        CHECK(g.cell(0.10) == 4);
        CHECK(g.cell(10.0) == g.n - 2);    // clamped to last cell
        CHECK(g.contains(0.999));
        CHECK(!g.contains(1.5));
    }
}
