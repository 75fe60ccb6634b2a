#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semicomp/characteristics.hpp"
#include "semicomp/payoff.hpp"

namespace semicomp {

struct SimConfig {
    std::uint64_t seed = 20260814;
    std::size_t paths = 100000;
    std::size_t steps = 256;  // uniform steps over the full horizon
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    double ci99 = 0.0;  // 2.576 * std_error
    std::size_t paths = 0;
};

struct PathBundle {
    std::vector<double> times;                // grid nodes including atom times
    std::vector<std::vector<double>> states;  // step-major: states[i][p]
};

Estimate summarize_samples(std::span<const double> v);

// Terminal states X_T started from (t0, x0); path p draws from the
// counter-based stream keyed by (seed, p), so results are independent of
// batching and thread count.
std::vector<double> simulate_terminal(const ProcessModel& model, const SimConfig& cfg,
                                      double t0, double x0);

PathBundle simulate_paths(const ProcessModel& model, const SimConfig& cfg, double t0, double x0,
                          std::size_t max_paths = 4096);

Estimate estimate_terminal(const ProcessModel& model, const Payoff& payoff, const SimConfig& cfg);
Estimate estimate_terminal_from(const ProcessModel& model, const Payoff& payoff,
                                const SimConfig& cfg, double t0, double x0);

struct BiasCheck {
    std::vector<std::size_t> ladder;  // step counts, coarse to fine
    std::vector<double> estimates;    // one per rung (common random numbers)
    double reference = 0.0;
    double std_error = 0.0;  // statistical error at the finest rung
    bool pass = false;       // |finest - reference| <= 3 std errors
};

BiasCheck bias_check(const ProcessModel& model, const Payoff& payoff, const SimConfig& cfg,
                     double reference);

} // namespace semicomp
