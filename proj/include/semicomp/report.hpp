#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semicomp/generator.hpp"
#include "semicomp/mc_engine.hpp"
#include "semicomp/ordering.hpp"

namespace semicomp {

enum class Conclusion { confirmed, contradicted, inconclusive };
const char* conclusion_name(Conclusion c);

// Monte Carlo comparison of one test function across the pair.
struct PayoffComparison {
    std::string name;
    Estimate x, y;
    double diff = 0.0;         // E f(Y_T) - E f(X_T)
    double combined_se = 0.0;  // sqrt(se_x^2 + se_y^2)
    int direction = 0;         // -1: significantly ordered, +1: significant reversal, 0: neutral
};

struct GridInfo {
    std::string source;  // "convolution" or "mc"
    double h = 0.0;
    std::size_t n = 0;
    double h_internal = 0.0;
    std::size_t n_internal = 0;
    std::size_t slices = 0;
    bool resolved = false;
};

struct ComparisonReport {
    std::string scenario_name;
    TheoremId theorem = TheoremId::cx_emm;
    int spec_version = 1;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t steps = 0;
    std::string backend;
    std::string tool_version;

    HypothesisReport checklist;
    bool structure_applicable = false;  // structural criterion used by this theorem
    StructuralComparison structure;
    LinkingScan linking;
    ResidualScan residual_x, residual_y;
    GridInfo grid_x, grid_y;

    PayoffComparison primary;
    std::vector<PayoffComparison> family;
    BiasCheck bias_x, bias_y;
    bool conv_available = false;  // spectral values at (t0, x0) for both models
    double conv_x = 0.0, conv_y = 0.0;

    OrderStatus verdict_structural = OrderStatus::incomparable;
    OrderStatus verdict_linking = OrderStatus::incomparable;
    OrderStatus verdict_mc = OrderStatus::incomparable;
    OrderStatus verdict = OrderStatus::incomparable;

    Conclusion conclusion = Conclusion::inconclusive;
    std::string detail;
    std::string failed_stage;  // nonempty when a pipeline stage threw

    int exit_code() const;  // 0 confirmed, 1 contradicted, 2 inconclusive
};

// Deterministic serializations (no timestamps, sorted keys).
std::string report_json(const ComparisonReport& r);
std::string report_text(const ComparisonReport& r);
// format: "json" | "text" | "csv_bundle".  For json/text an empty out_path
// writes to stdout; csv_bundle treats out_path as a directory and writes
// summary.csv, estimates.csv and checklist.csv into it.
void write_report(const ComparisonReport& r, const std::string& format,
                  const std::string& out_path);

} // namespace semicomp
