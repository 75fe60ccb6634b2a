#pragma once

#include <cstdint>
#include <optional>

#include "semicomp/report.hpp"
#include "semicomp/scenario.hpp"

namespace semicomp {

inline constexpr const char* kToolVersion = "1.0.0";

// Command-line overrides applied on top of the scenario file.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::optional<double> grid_h;
    double tolerance_scale = 1.0;  // scales the ordering tolerance of the linking scan
};

// Full verification pipeline: merge/rebase, field propagation, residual
// scans, structural comparison, linking scan, hypothesis checklist, Monte
// Carlo cross-checks, conclusion.  Stage exceptions are captured into the
// report (conclusion inconclusive, failed_stage set) rather than thrown.
ComparisonReport run_scenario(const Scenario& sc, const RunOptions& opt = {});

} // namespace semicomp
