#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "doctest.h"

#include "semicomp/characteristics.hpp"
#include "semicomp/errors.hpp"
#include "semicomp/mc_engine.hpp"
#include "semicomp/payoff.hpp"
#include "support/oracles.hpp"

using namespace semicomp;

namespace {

// ATM Bachelier value for sigma = 0.3, T = 1: sigma * phi(0).
constexpr double kBachelierATM03 = 0.1196826841204298;
// Poisson-mixture series value for c = 0.04, jumps ~ N(0, 0.3^2) at rate 1.5,
// T = 1, call strike 0 on the compensated (martingale) process.
constexpr double kSeriesCall15 = 0.15799367835868732;

JumpKernel power_kernel(double c, double alpha, double radius) {
    LevyDensity d;
    d.k = [c, alpha, radius](double y) {
        const double ay = std::fabs(y);
        return ay <= radius ? c * std::pow(ay, -1.0 - alpha) : 0.0;
    };
    d.support_radius = radius;
    return JumpKernel::levy(d);
}

} // namespace

TEST_SUITE("mc_engine") {
    TEST_CASE("summarize_samples on a hand-checked vector") {
        const double v[] = {1.0, 2.0, 3.0, 4.0};
        const Estimate e = summarize_samples(v);
        CHECK(e.paths == 4);
        CHECK(e.value == doctest::Approx(2.5).epsilon(1e-15));
        // sample variance 5/3, std error sqrt(5/12)
        CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
        CHECK(e.ci99 == doctest::Approx(2.576 * e.std_error).epsilon(1e-15));

        const Estimate empty = summarize_samples(std::span<const double>{});
        CHECK(empty.paths == 0);
        CHECK(empty.value == 0.0);

        const double one[] = {7.0};
        CHECK(summarize_samples(one).std_error == 0.0);
    }

    TEST_CASE("pure drift integrates exactly") {
        const auto m = ProcessModel::levy(0.7, 0.0, JumpKernel::none_(), 1.0, "P", 0.25);
        SimConfig cfg;
        cfg.paths = 16;
        cfg.steps = 64;
        const auto xs = simulate_terminal(m, cfg, 0.0, m.x0);
        for (double x : xs) CHECK(x == doctest::Approx(0.95).epsilon(1e-13));
    }

    TEST_CASE("terminal draws are reproducible and batch-independent") {
        const auto m = ProcessModel::levy(0.0, 0.09, JumpKernel::none_(), 1.0, "Q", 0.0, true);
        SimConfig small;
        small.paths = 300;
        small.steps = 32;
        SimConfig big = small;
        big.paths = 5000; // spans a different block layout
        const auto a = simulate_terminal(m, small, 0.0, m.x0);
        const auto b = simulate_terminal(m, small, 0.0, m.x0);
        CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
        const auto c = simulate_terminal(m, big, 0.0, m.x0);
        CHECK(std::memcmp(a.data(), c.data(), a.size() * sizeof(double)) == 0);

        SimConfig other = small;
        other.seed = small.seed + 1;
        const auto d = simulate_terminal(m, other, 0.0, m.x0);
        CHECK(std::memcmp(a.data(), d.data(), a.size() * sizeof(double)) != 0);
    }

    TEST_CASE("constant-coefficient fast path equals the general state-dependent path") {
        // Same coefficients, one routed through the PII block update and one
        // through the per-path loop; the arithmetic must agree bit for bit.
        const auto fast = ProcessModel::levy(0.1, 0.04, JumpKernel::none_(), 1.0, "P", 0.5);
        const auto slow = ProcessModel::ito([](double, double) { return 0.1; },
                                            [](double, double) { return 0.04; },
                                            JumpKernel::none_(), nullptr, 1.0, "P", 0.5);
        SimConfig cfg;
        cfg.paths = 2000;
        cfg.steps = 64;
        const auto xf = simulate_terminal(fast, cfg, 0.0, 0.5);
        const auto xs = simulate_terminal(slow, cfg, 0.0, 0.5);
        CHECK(std::memcmp(xf.data(), xs.data(), xf.size() * sizeof(double)) == 0);
    }

    TEST_CASE("Bachelier call price matches the closed form") {
        const auto m = ProcessModel::levy(0.0, 0.09, JumpKernel::none_(), 1.0, "Q", 0.0, true);
        SimConfig cfg;
        cfg.paths = 40000;
        cfg.steps = 64; // Brownian increments are exact at any step count
        const Estimate e = estimate_terminal(m, Payoff::call(0.0), cfg);
        CHECK(e.paths == cfg.paths);
        CHECK(e.std_error > 0.0);
        CHECK(e.std_error < 2e-3);
        CHECK(std::fabs(e.value - kBachelierATM03) <= 3.5 * e.std_error);
    }

    TEST_CASE("compensated compound Poisson matches the series oracle") {
        const auto m = ProcessModel::levy(
            0.0, 0.04, JumpKernel::compound_poisson(1.5, JumpLaw::normal(0.0, 0.3)), 1.0, "Q",
            0.0, true);
        SimConfig cfg;
        cfg.paths = 60000;
        cfg.steps = 64;
        const Estimate e = estimate_terminal(m, Payoff::call(0.0), cfg);
        CHECK(std::fabs(e.value - kSeriesCall15) <= 3.5 * e.std_error);
        // The frozen constant itself reproduces from the mixture series.
        CHECK(oracles::poisson_series_call(0.0, 0.0, 0.04, 1.5, 0.0, 0.3, 1.0) ==
              doctest::Approx(kSeriesCall15).epsilon(1e-12));
        // Compensation keeps the terminal mean at the start point.
        const auto xs = simulate_terminal(m, cfg, 0.0, m.x0);
        const Estimate mean = summarize_samples(xs);
        CHECK(std::fabs(mean.value - 0.0) <= 3.5 * mean.std_error);
    }

    TEST_CASE("truncated infinite-activity sampler reproduces the moment rates") {
        const auto m =
            ProcessModel::levy(0.0, 0.0, power_kernel(1.0, 0.5, 1.0), 1.0, "Q", 0.0, true);
        SimConfig cfg;
        cfg.paths = 30000;
        cfg.steps = 128;
        const auto xs = simulate_terminal(m, cfg, 0.0, m.x0);
        const Estimate mean = summarize_samples(xs);
        CHECK(std::fabs(mean.value) <= 3.5 * mean.std_error);
        double ss = 0.0;
        for (double x : xs) ss += (x - mean.value) * (x - mean.value);
        const double var = ss / double(xs.size() - 1);
        CHECK(var == doctest::Approx(4.0 / 3.0).epsilon(0.04));
    }

    TEST_CASE("fixed-time atoms: compensation, discreteness, and drift mass") {
        std::map<double, AtomMeasure> certain{{0.5, AtomMeasure{1.0, JumpLaw::point(0.4)}}};
        auto m1 = ProcessModel::grigelionis(0.0, 0.0, JumpKernel::none_(), certain, 1.0, "P",
                                            0.25);
        SimConfig cfg;
        cfg.paths = 512;
        cfg.steps = 16;
        // Certain jump of 0.4 is exactly cancelled by its compensator.
        for (double x : simulate_terminal(m1, cfg, 0.0, m1.x0))
            CHECK(x == doctest::Approx(0.25).epsilon(1e-14));

        // Atom drift mass moves every path deterministically.
        m1.chars.atom_drift[0.5] = -0.2;
        m1.validate();
        for (double x : simulate_terminal(m1, cfg, 0.0, m1.x0))
            CHECK(x == doctest::Approx(0.05).epsilon(1e-14));

        // Bernoulli atom: terminal support is exactly {x0 + 0.5, x0 - 0.5}.
        std::map<double, AtomMeasure> coin{{0.5, AtomMeasure{0.5, JumpLaw::point(1.0)}}};
        const auto m2 =
            ProcessModel::grigelionis(0.0, 0.0, JumpKernel::none_(), coin, 1.0, "P", 0.25);
        SimConfig big = cfg;
        big.paths = 40000;
        const auto xs = simulate_terminal(m2, big, 0.0, m2.x0);
        std::size_t ups = 0;
        for (double x : xs) {
            const bool up = std::fabs(x - 0.75) < 1e-14;
            const bool dn = std::fabs(x + 0.25) < 1e-14;
            CHECK((up || dn));
            ups += up;
        }
        const double frac = double(ups) / double(xs.size());
        CHECK(std::fabs(frac - 0.5) < 3.5 * std::sqrt(0.25 / double(xs.size())));
    }

    TEST_CASE("simulate_paths carries the grid, atoms, and terminal agreement") {
        std::map<double, AtomMeasure> coin{{0.5, AtomMeasure{0.5, JumpLaw::point(1.0)}}};
        const auto m =
            ProcessModel::grigelionis(0.1, 0.04, JumpKernel::none_(), coin, 1.0, "P", 0.0);
        SimConfig cfg;
        cfg.paths = 300;
        cfg.steps = 32;
        const PathBundle pb = simulate_paths(m, cfg, 0.0, m.x0);
        CHECK(pb.times.front() == 0.0);
        CHECK(pb.times.back() == 1.0);
        CHECK(std::count(pb.times.begin(), pb.times.end(), 0.5) == 1);
        CHECK(pb.states.size() == pb.times.size());
        for (const auto& row : pb.states) CHECK(row.size() == cfg.paths);
        for (double x : pb.states.front()) CHECK(x == 0.0);
        const auto terminal = simulate_terminal(m, cfg, 0.0, m.x0);
        CHECK(std::memcmp(pb.states.back().data(), terminal.data(),
                          terminal.size() * sizeof(double)) == 0);
        // The cap bounds the number of simulated paths.
        SimConfig wide = cfg;
        wide.paths = 10000;
        CHECK(simulate_paths(m, wide, 0.0, m.x0, 128).states.back().size() == 128);
    }

    TEST_CASE("discretization bias ladder against the exact Bachelier value") {
        const auto m = ProcessModel::levy(0.0, 0.09, JumpKernel::none_(), 1.0, "Q", 0.0, true);
        SimConfig cfg;
        cfg.paths = 20000;
        const BiasCheck bc = bias_check(m, Payoff::call(0.0), cfg, kBachelierATM03);
        CHECK(bc.ladder.size() == bc.estimates.size());
        CHECK(bc.ladder.size() >= 2);
        CHECK(std::is_sorted(bc.ladder.begin(), bc.ladder.end()));
        CHECK(bc.reference == kBachelierATM03);
        CHECK(bc.std_error > 0.0);
        CHECK(bc.pass);
    }

    TEST_CASE("input validation and step-intensity guard") {
        const auto m = ProcessModel::levy(0.0, 0.09, JumpKernel::none_(), 1.0, "Q", 0.0, true);
        SimConfig cfg;
        cfg.paths = 4;
        cfg.steps = 16;
        CHECK_THROWS_AS((void)simulate_terminal(m, cfg, 2.0, 0.0), ConfigError);
        CHECK_THROWS_AS((void)simulate_paths(m, cfg, -1.0, 0.0), ConfigError);

        const auto hot = ProcessModel::levy(
            0.0, 0.0, JumpKernel::compound_poisson(1e4, JumpLaw::point(1.0)), 1.0, "P", 0.0);
        CHECK_THROWS_AS((void)simulate_terminal(hot, cfg, 0.0, 0.0), ConfigError);
    }
}
