#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "semicomp/errors.hpp"
#include "semicomp/pipeline.hpp"
#include "semicomp/report.hpp"
#include "semicomp/scenario.hpp"

using namespace semicomp;
namespace fs = std::filesystem;

namespace {

const char* kBachelierPair = R"({
  "spec_version": 1,
  "name": "bachelier pair",
  "theorem": "cx_emm",
  "model_x": {"family": "levy", "diffusion": 0.09,   "horizon": 1.0, "martingale": true},
  "model_y": {"family": "levy", "diffusion": 0.0225, "horizon": 1.0, "martingale": true},
  "payoff": {"type": "call", "strike": 0.0},
  "sim": {"seed": 77, "paths": 12000, "steps": 64}
})";

std::string swapped_pair() {
    std::string s = kBachelierPair;
    const auto a = s.find("0.09"), b = s.find("0.0225");
    s.replace(b, 6, "0.09");
    s.replace(a, 4, "0.0225");
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_SUITE("cli_compare") {
    TEST_CASE("scenario parsing: models, payoff, budget and assumptions") {
        const Scenario sc = parse_scenario(kBachelierPair);
        CHECK(sc.name == "bachelier pair");
        CHECK(sc.theorem == TheoremId::cx_emm);
        CHECK(sc.model_x.chars.measure == "Q");
        CHECK(sc.model_x.martingale);
        CHECK(sc.model_x.chars.diffusion_at(0.0, 0.0) == 0.09);
        CHECK(sc.model_y.chars.diffusion_at(0.0, 0.0) == 0.0225);
        CHECK(sc.payoff.name == "call");
        CHECK(sc.sim.seed == 77);
        CHECK(sc.sim.paths == 12000);
        CHECK(sc.sim.steps == 64);
        CHECK(sc.grid_h == 1.0 / 128.0);
        CHECK(!sc.assume.support_inclusion);

        // Minimal scenario falls back to defaults.
        const Scenario mini = parse_scenario(R"({
            "theorem": "icx_p",
            "model_x": {"horizon": 1.0},
            "model_y": {"horizon": 1.0}
        })");
        CHECK(mini.name == "unnamed");
        CHECK(mini.model_x.chars.measure == "P");
        CHECK(mini.payoff.name == "call");
        CHECK(mini.sim.paths == 100000);
        CHECK(mini.sim.steps == 256);

        const Scenario rich = parse_scenario(R"({
            "name": "atoms",
            "theorem": "girsanov_emm",
            "model_x": {
                "family": "grigelionis", "diffusion": 0.04, "horizon": 1.0,
                "martingale": true,
                "jumps": {"type": "compound_poisson", "intensity": 1.5,
                          "law": {"kind": "normal", "mean": 0.0, "sdev": 0.3}},
                "atoms": [{"time": 0.5, "mass": 0.5,
                           "law": {"kind": "uniform", "lo": -0.1, "hi": 0.1},
                           "drift": -0.05}]
            },
            "model_y": {"family": "levy", "diffusion": 0.04, "horizon": 1.0,
                        "martingale": true},
            "payoff": {"type": "softplus", "beta": 6.0},
            "assume": {"support_inclusion": true, "dominated_convergence": true},
            "grid": {"h": 0.015625}
        })");
        CHECK(rich.model_x.family == ModelFamily::grigelionis);
        const auto& atoms = rich.model_x.chars.kernel.atoms;
        REQUIRE(atoms.count(0.5) == 1);
        CHECK(atoms.at(0.5).mass == 0.5);
        CHECK(atoms.at(0.5).law.kind == LawKind::uniform);
        CHECK(rich.model_x.chars.atom_drift.at(0.5) == -0.05);
        const auto& itimes = rich.model_x.chars.integrator.atoms;
        CHECK(std::count(itimes.begin(), itimes.end(), 0.5) == 1);
        CHECK(rich.model_x.chars.kernel.intensity == 1.5);
        CHECK(rich.payoff.name == "softplus");
        CHECK(rich.assume.support_inclusion);
        CHECK(rich.assume.dominated_convergence);
        CHECK(rich.grid_h == 0.015625);
    }

    TEST_CASE("scenario parsing: levy density kernels") {
        const Scenario et = parse_scenario(R"({
            "theorem": "cx_emm",
            "model_x": {"diffusion": 0.04, "horizon": 1.0, "martingale": true,
                        "jumps": {"type": "exp_tempered", "c": 0.5, "lambda": 3.0}},
            "model_y": {"diffusion": 0.04, "horizon": 1.0, "martingale": true}
        })");
        const JumpKernel& ke = et.model_x.chars.kernel;
        CHECK(ke.lebesgue == JumpKernel::Lebesgue::levy_density);
        CHECK(ke.density.support_radius == 0.0);
        REQUIRE(static_cast<bool>(ke.density.exact_exponent));
        CHECK(ke.density.exact_exponent(0.0).real() == 0.0);
        CHECK(ke.density.k(0.5) == doctest::Approx(0.5 * std::exp(-1.5) / 0.5));

        const Scenario pw = parse_scenario(R"({
            "theorem": "cx_emm",
            "model_x": {"diffusion": 0.04, "horizon": 1.0, "martingale": true,
                        "jumps": {"type": "power", "c": 0.2, "alpha": 0.5, "radius": 1.5}},
            "model_y": {"diffusion": 0.04, "horizon": 1.0, "martingale": true}
        })");
        const JumpKernel& kp = pw.model_x.chars.kernel;
        CHECK(kp.lebesgue == JumpKernel::Lebesgue::levy_density);
        CHECK(kp.density.support_radius == 1.5);
        CHECK(!static_cast<bool>(kp.density.exact_exponent));
        CHECK(kp.density.k(2.0) == 0.0);
        CHECK(kp.density.k(0.5) == doctest::Approx(0.2 * std::pow(0.5, -1.5)));
    }

    TEST_CASE("scenario parsing rejects malformed input") {
        auto bad = [](const char* text) {
            CHECK_THROWS_AS((void)parse_scenario(text), ConfigError);
        };
        bad("not json at all");
        bad(R"({})");
        bad(R"({"theorem": "foo",
                "model_x": {"horizon": 1.0}, "model_y": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm", "model_x": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"horizon": 1.0}, "model_y": {"horizon": 2.0}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"family": "levy", "horizon": 1.0,
                            "atoms": [{"time": 0.5}]},
                "model_y": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"horizon": 1.0, "jumps": {"type": "gamma"}},
                "model_y": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"horizon": 1.0,
                            "jumps": {"type": "compound_poisson", "intensity": 1.0,
                                      "law": {"kind": "cauchy"}}},
                "model_y": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"horizon": 1.0}, "model_y": {"horizon": 1.0},
                "payoff": {"type": "digital"}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"horizon": 1.0,
                            "jumps": {"type": "power", "c": 1.0, "alpha": 2.5}},
                "model_y": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"horizon": 1.0,
                            "jumps": {"type": "compound_poisson", "intensity": -1.0,
                                      "law": {"kind": "point", "value": 0.1}}},
                "model_y": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm", "grid": {"h": 0.0},
                "model_x": {"horizon": 1.0}, "model_y": {"horizon": 1.0}})");
        bad(R"({"spec_version": 2, "theorem": "cx_emm",
                "model_x": {"horizon": 1.0}, "model_y": {"horizon": 1.0}})");
        bad(R"({"theorem": "cx_emm",
                "model_x": {"drift": 0.1}, "model_y": {"horizon": 1.0}})");

        // Parse errors carry the origin label.
        try {
            (void)parse_scenario("{}", "myfile.json");
            CHECK(false);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("myfile.json") != std::string::npos);
        }
        CHECK_THROWS_AS((void)load_scenario("/nonexistent/scenario.json"), IoError);
    }

    TEST_CASE("pipeline confirms the ordered pair and reports deterministically") {
        const Scenario sc = parse_scenario(kBachelierPair);
        const ComparisonReport rep = run_scenario(sc);
        CHECK(rep.conclusion == Conclusion::confirmed);
        CHECK(rep.exit_code() == 0);
        CHECK(rep.failed_stage.empty());
        CHECK(rep.verdict == OrderStatus::ordered);
        CHECK(rep.verdict_structural == OrderStatus::ordered);
        CHECK(rep.verdict_linking == OrderStatus::ordered);
        CHECK(rep.linking.violations == 0);
        CHECK(rep.checklist.acceptable());
        CHECK(rep.structure_applicable);
        CHECK(rep.conv_available);
        CHECK(std::fabs(rep.conv_x - 0.1196826841204298) < 5e-5);
        CHECK(std::fabs(rep.conv_y - 0.0598413420602149) < 5e-5);
        CHECK(rep.primary.direction == -1);
        CHECK(rep.primary.x.paths == 12000);
        CHECK(rep.family.size() == 37);
        CHECK(rep.bias_x.pass);
        CHECK(rep.bias_y.pass);
        CHECK(rep.grid_x.source == "convolution");
        CHECK(rep.grid_x.resolved);
        CHECK(!rep.backend.empty());
        CHECK(rep.tool_version == kToolVersion);

        // Byte-identical serialization across repeated runs.
        const std::string j1 = report_json(rep);
        const std::string j2 = report_json(run_scenario(sc));
        CHECK(j1 == j2);

        const auto j = nlohmann::json::parse(j1);
        CHECK(j["conclusion"]["status"] == "confirmed");
        CHECK(j["conclusion"]["exit_code"] == 0);
        CHECK(j["scenario"]["theorem"] == "cx_emm");
        CHECK(j["provenance"]["seed"] == 77);
        CHECK(j["checklist"].size() == 9);
        CHECK(j["estimates"]["family"].size() == 37);
        CHECK(j["verdicts"]["combined"] == "ordered");

        const std::string text = report_text(rep);
        CHECK(text.find("conclusion confirmed") != std::string::npos);
        CHECK(text.find("bachelier pair") != std::string::npos);
        CHECK(text.find("seed=77") != std::string::npos);
    }

    TEST_CASE("pipeline contradicts the swapped pair") {
        const Scenario sc = parse_scenario(swapped_pair());
        CHECK(sc.model_x.chars.diffusion_at(0.0, 0.0) == 0.0225);
        const ComparisonReport rep = run_scenario(sc);
        CHECK(rep.conclusion == Conclusion::contradicted);
        CHECK(rep.exit_code() == 1);
        CHECK(rep.linking.violations > 0);
        CHECK(rep.verdict_mc == OrderStatus::reversed);
        CHECK(!rep.detail.empty());
    }

    TEST_CASE("pipeline goes inconclusive when a hypothesis fails") {
        std::string s = kBachelierPair;
        s.replace(s.find("\"model_y\": {"), 12, R"("model_y": {"x0": 0.15, )");
        const Scenario sc = parse_scenario(s);
        const ComparisonReport rep = run_scenario(sc);
        CHECK(rep.conclusion == Conclusion::inconclusive);
        CHECK(rep.exit_code() == 2);
        CHECK(rep.detail.find("hypothesis check failed") != std::string::npos);
        CHECK(rep.detail.find("initial_points") != std::string::npos);
    }

    TEST_CASE("pipeline captures stage failures instead of throwing") {
        const Scenario sc = parse_scenario(R"({
            "name": "overloaded",
            "theorem": "girsanov_emm",
            "model_x": {"horizon": 1.0, "martingale": true,
                        "jumps": {"type": "compound_poisson", "intensity": 2500.0,
                                  "law": {"kind": "normal", "mean": 0.0, "sdev": 0.05}}},
            "model_y": {"horizon": 1.0, "martingale": true,
                        "jumps": {"type": "compound_poisson", "intensity": 2500.0,
                                  "law": {"kind": "normal", "mean": 0.0, "sdev": 0.05}}},
            "sim": {"paths": 2000, "steps": 4}
        })");
        const ComparisonReport rep = run_scenario(sc);
        CHECK(rep.conclusion == Conclusion::inconclusive);
        CHECK(rep.exit_code() == 2);
        CHECK(!rep.failed_stage.empty());
        CHECK(rep.detail.find(rep.failed_stage) != std::string::npos);
    }

    TEST_CASE("run options override the scenario budget") {
        const Scenario sc = parse_scenario(kBachelierPair);
        RunOptions opt;
        opt.seed = 123;
        opt.paths = 5000;
        opt.steps = 32;
        opt.grid_h = 1.0 / 64.0;
        const ComparisonReport rep = run_scenario(sc, opt);
        CHECK(rep.seed == 123);
        CHECK(rep.paths == 5000);
        CHECK(rep.steps == 32);
        CHECK(rep.primary.x.paths == 5000);
        CHECK(rep.grid_x.h == 1.0 / 64.0);
        CHECK(rep.conclusion == Conclusion::confirmed);
    }

    TEST_CASE("report writers: files, csv bundle and error handling") {
        Scenario sc = parse_scenario(kBachelierPair);
        sc.sim.paths = 4000;
        const ComparisonReport rep = run_scenario(sc);

        const fs::path dir = fs::temp_directory_path() / "semicomp_cli_report_test";
        fs::remove_all(dir);
        fs::create_directories(dir);

        write_report(rep, "json", (dir / "r.json").string());
        const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
        CHECK(j["scenario"]["name"] == "bachelier pair");

        write_report(rep, "text", (dir / "r.txt").string());
        CHECK(slurp(dir / "r.txt").find("verdicts") != std::string::npos);

        write_report(rep, "csv_bundle", (dir / "bundle").string());
        const std::string sum = slurp(dir / "bundle" / "summary.csv");
        CHECK(sum.rfind("key,value\n", 0) == 0);
        CHECK(sum.find("conclusion,confirmed") != std::string::npos);
        CHECK(sum.find("exit_code,0") != std::string::npos);
        const std::string est = slurp(dir / "bundle" / "estimates.csv");
        CHECK(count_lines(est) == 2 + rep.family.size());
        const std::string chk = slurp(dir / "bundle" / "checklist.csv");
        CHECK(count_lines(chk) == 1 + rep.checklist.items.size());

        CHECK_THROWS_AS(write_report(rep, "yaml", (dir / "r.yaml").string()), ConfigError);
        CHECK_THROWS_AS(write_report(rep, "csv_bundle", ""), ConfigError);
        fs::remove_all(dir);
    }
}
