#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "semicomp/kernels/kernels.hpp"
#include "semicomp/pipeline.hpp"
#include "semicomp/report.hpp"
#include "semicomp/scenario.hpp"

namespace fs = std::filesystem;
using namespace semicomp;

namespace {

int run_one(const std::string& path, const RunOptions& ropt, const std::string& format,
            const std::string& out) {
    const Scenario sc = load_scenario(path);
    const ComparisonReport rep = run_scenario(sc, ropt);
    write_report(rep, format, out);
    return rep.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semicomp: comparison of semimartingale models via differential "
                 "characteristics"};
    app.require_subcommand(1);

    RunOptions ropt;
    std::string format;
    std::string out;
    std::string scenario_path;
    std::string dir;
    std::string backend_name;

    app.add_option("--kernels", backend_name,
                   "compute backend (auto, scalar, or a SIMD variant)");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", ropt.seed, "override the Monte Carlo seed");
        cmd->add_option("--paths", ropt.paths, "override the Monte Carlo path count");
        cmd->add_option("--steps", ropt.steps, "override the time-step count");
        cmd->add_option("--grid", ropt.grid_h, "override the output grid spacing");
        cmd->add_option("--tolerance-scale", ropt.tolerance_scale,
                        "scale factor for the ordering tolerance");
        cmd->add_option("--format", format, "json, text or csv_bundle");
        cmd->add_option("--out", out, "output file (directory for csv_bundle)");
    };

    CLI::App* cmd_run = app.add_subcommand("run", "run one scenario and print a summary");
    cmd_run->add_option("scenario", scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(cmd_run);

    CLI::App* cmd_report =
        app.add_subcommand("report", "run one scenario and emit the full report");
    cmd_report->add_option("scenario", scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(cmd_report);

    CLI::App* cmd_batch = app.add_subcommand("batch", "run every scenario in a directory");
    cmd_batch->add_option("dir", dir, "directory of scenario JSON files")
        ->required()
        ->check(CLI::ExistingDirectory);
    add_common(cmd_batch);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!backend_name.empty()) kernels::set_backend(backend_name);

        if (cmd_run->parsed()) {
            if (format.empty()) format = "text";
            return run_one(scenario_path, ropt, format, out);
        }
        if (cmd_report->parsed()) {
            if (format.empty()) format = "json";
            return run_one(scenario_path, ropt, format, out);
        }
        if (cmd_batch->parsed()) {
            if (format.empty()) format = "json";
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(dir))
                if (e.is_regular_file() && e.path().extension() == ".json")
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            if (files.empty()) {
                std::cerr << "error: no scenario files in " << dir << "\n";
                return 2;
            }
            int worst = 0;
            for (const auto& f : files) {
                const Scenario sc = load_scenario(f.string());
                const ComparisonReport rep = run_scenario(sc, ropt);
                std::cout << f.filename().string() << ": " << conclusion_name(rep.conclusion)
                          << " (verdict " << order_status_name(rep.verdict) << ")";
                if (!rep.failed_stage.empty()) std::cout << " [stage " << rep.failed_stage << "]";
                std::cout << "\n";
                if (!out.empty()) {
                    fs::create_directories(out);
                    write_report(rep, format,
                                 (fs::path(out) / f.filename()).string());
                }
                worst = std::max(worst, rep.exit_code());
            }
            return worst;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
