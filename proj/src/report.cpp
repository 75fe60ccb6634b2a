#include "semicomp/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "semicomp/errors.hpp"

#include "json.hpp"

namespace semicomp {

namespace {

using nlohmann::json;

json num(double v) {
    if (std::isfinite(v)) return json(v);
    return json(v > 0 ? "inf" : (v < 0 ? "-inf" : "nan"));
}

json estimate_json(const Estimate& e) {
    return json{{"value", num(e.value)},
                {"std_error", num(e.std_error)},
                {"ci99", num(e.ci99)},
                {"paths", e.paths}};
}

json payoff_cmp_json(const PayoffComparison& p) {
    return json{{"name", p.name},
                {"x", estimate_json(p.x)},
                {"y", estimate_json(p.y)},
                {"diff", num(p.diff)},
                {"combined_se", num(p.combined_se)},
                {"direction", p.direction}};
}

json grid_json(const GridInfo& g) {
    return json{{"source", g.source}, {"h", num(g.h)},
                {"n", g.n},           {"h_internal", num(g.h_internal)},
                {"n_internal", g.n_internal}, {"slices", g.slices},
                {"resolved", g.resolved}};
}

json residual_json(const ResidualScan& s) {
    return json{{"max_abs_u", num(s.max_abs_u)},
                {"max_abs_ubar", num(s.max_abs_ubar)},
                {"max_atom", num(s.max_atom)},
                {"x_lo", num(s.x_lo)},
                {"x_hi", num(s.x_hi)},
                {"t_hi", num(s.t_hi)},
                {"points", s.points},
                {"jump_skipped", s.jump_skipped},
                {"scale", num(s.scale)}};
}

json bias_json(const BiasCheck& b) {
    return json{{"ladder", b.ladder},
                {"estimates", b.estimates},
                {"reference", num(b.reference)},
                {"std_error", num(b.std_error)},
                {"pass", b.pass}};
}

} // namespace

const char* conclusion_name(Conclusion c) {
    switch (c) {
        case Conclusion::confirmed: return "confirmed";
        case Conclusion::contradicted: return "contradicted";
        case Conclusion::inconclusive: return "inconclusive";
    }
    return "?";
}

int ComparisonReport::exit_code() const {
    switch (conclusion) {
        case Conclusion::confirmed: return 0;
        case Conclusion::contradicted: return 1;
        case Conclusion::inconclusive: return 2;
    }
    return 2;
}

std::string report_json(const ComparisonReport& r) {
    json checklist = json::array();
    for (const auto& c : r.checklist.items)
        checklist.push_back(json{{"name", c.name},
                                 {"status", check_status_name(c.status)},
                                 {"detail", c.detail}});
    json family = json::array();
    for (const auto& p : r.family) family.push_back(payoff_cmp_json(p));

    json structure = json{{"applicable", r.structure_applicable},
                          {"drift", order_status_name(r.structure.drift)},
                          {"diffusion", order_status_name(r.structure.diffusion)},
                          {"kernel", order_status_name(r.structure.kernel)},
                          {"atoms", order_status_name(r.structure.atoms)},
                          {"combined", order_status_name(r.structure.combined)},
                          {"detail", r.structure.detail}};

    json linking = json{{"points", r.linking.points},
                        {"resolved", r.linking.resolved},
                        {"violations", r.linking.violations},
                        {"fraction", num(r.linking.fraction)},
                        {"max_violation", num(r.linking.max_violation)},
                        {"tol", num(r.linking.tol)}};

    json j = json{
        {"scenario", json{{"name", r.scenario_name},
                          {"theorem", theorem_name(r.theorem)},
                          {"spec_version", r.spec_version}}},
        {"checklist", checklist},
        {"structure", structure},
        {"linking", linking},
        {"residual", json{{"x", residual_json(r.residual_x)},
                          {"y", residual_json(r.residual_y)}}},
        {"estimates", json{{"primary", payoff_cmp_json(r.primary)},
                           {"family", family},
                           {"bias_x", bias_json(r.bias_x)},
                           {"bias_y", bias_json(r.bias_y)},
                           {"conv_available", r.conv_available},
                           {"conv_x", num(r.conv_x)},
                           {"conv_y", num(r.conv_y)}}},
        {"verdicts", json{{"structural", order_status_name(r.verdict_structural)},
                          {"linking", order_status_name(r.verdict_linking)},
                          {"mc", order_status_name(r.verdict_mc)},
                          {"combined", order_status_name(r.verdict)}}},
        {"conclusion", json{{"status", conclusion_name(r.conclusion)},
                            {"detail", r.detail},
                            {"failed_stage", r.failed_stage},
                            {"exit_code", r.exit_code()}}},
        {"provenance", json{{"seed", r.seed},
                            {"paths", r.paths},
                            {"steps", r.steps},
                            {"backend", r.backend},
                            {"tool_version", r.tool_version},
                            {"spec_version", r.spec_version},
                            {"grids", json{{"x", grid_json(r.grid_x)},
                                           {"y", grid_json(r.grid_y)}}}}}};
    return j.dump(2) + "\n";
}

std::string report_text(const ComparisonReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << "scenario   " << r.scenario_name << "  (theorem " << theorem_name(r.theorem)
       << ")\n";
    os << "conclusion " << conclusion_name(r.conclusion);
    if (!r.detail.empty()) os << "  -- " << r.detail;
    os << "\n";
    if (!r.failed_stage.empty()) os << "failed stage: " << r.failed_stage << "\n";
    os << "verdicts   structural=" << order_status_name(r.verdict_structural)
       << " linking=" << order_status_name(r.verdict_linking)
       << " mc=" << order_status_name(r.verdict_mc)
       << " combined=" << order_status_name(r.verdict) << "\n";
    os << "checklist\n";
    for (const auto& c : r.checklist.items)
        os << "  " << c.name << ": " << check_status_name(c.status)
           << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    os << "linking    resolved=" << r.linking.resolved << " violations=" << r.linking.violations
       << " fraction=" << r.linking.fraction << "\n";
    os << "residual X max|u|=" << r.residual_x.max_abs_u
       << " max|ubar|=" << r.residual_x.max_abs_ubar << " atom=" << r.residual_x.max_atom
       << " scale=" << r.residual_x.scale << (r.residual_x.jump_skipped ? " [jump skipped]" : "")
       << "\n";
    os << "residual Y max|u|=" << r.residual_y.max_abs_u
       << " max|ubar|=" << r.residual_y.max_abs_ubar << " atom=" << r.residual_y.max_atom
       << " scale=" << r.residual_y.scale << (r.residual_y.jump_skipped ? " [jump skipped]" : "")
       << "\n";
    os << "primary    E f(X_T)=" << r.primary.x.value << " (se " << r.primary.x.std_error
       << ")  E f(Y_T)=" << r.primary.y.value << " (se " << r.primary.y.std_error
       << ")  diff=" << r.primary.diff << "\n";
    if (r.conv_available)
        os << "spectral   f(X)=" << r.conv_x << "  f(Y)=" << r.conv_y << "\n";
    os << "family     " << r.family.size() << " test functions";
    std::size_t rev = 0, ord = 0;
    for (const auto& p : r.family) {
        if (p.direction > 0) ++rev;
        if (p.direction < 0) ++ord;
    }
    os << " (" << ord << " significantly ordered, " << rev << " reversed)\n";
    os << "bias check X " << (r.bias_x.pass ? "pass" : "FAIL") << ", Y "
       << (r.bias_y.pass ? "pass" : "FAIL") << "\n";
    os << "grids      X " << r.grid_x.source << " n=" << r.grid_x.n << " h=" << r.grid_x.h
       << " internal n=" << r.grid_x.n_internal << "; Y " << r.grid_y.source
       << " n=" << r.grid_y.n << "\n";
    os << "provenance seed=" << r.seed << " paths=" << r.paths << " steps=" << r.steps
       << " backend=" << r.backend << " tool=" << r.tool_version << "\n";
    return os.str();
}

namespace {

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << body;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void write_report(const ComparisonReport& r, const std::string& format,
                  const std::string& out_path) {
    if (format == "json" || format == "text") {
        const std::string body = format == "json" ? report_json(r) : report_text(r);
        if (out_path.empty())
            std::cout << body;
        else
            write_file(out_path, body);
        return;
    }
    if (format == "csv_bundle") {
        if (out_path.empty()) throw ConfigError("csv_bundle needs an output directory");
        std::filesystem::create_directories(out_path);
        std::ostringstream sum;
        sum.precision(17);
        sum << "key,value\n";
        sum << "scenario," << csv_escape(r.scenario_name) << "\n";
        sum << "theorem," << theorem_name(r.theorem) << "\n";
        sum << "conclusion," << conclusion_name(r.conclusion) << "\n";
        sum << "detail," << csv_escape(r.detail) << "\n";
        sum << "verdict," << order_status_name(r.verdict) << "\n";
        sum << "verdict_structural," << order_status_name(r.verdict_structural) << "\n";
        sum << "verdict_linking," << order_status_name(r.verdict_linking) << "\n";
        sum << "verdict_mc," << order_status_name(r.verdict_mc) << "\n";
        sum << "linking_fraction," << r.linking.fraction << "\n";
        sum << "residual_x_max_u," << r.residual_x.max_abs_u << "\n";
        sum << "residual_y_max_u," << r.residual_y.max_abs_u << "\n";
        sum << "seed," << r.seed << "\n";
        sum << "paths," << r.paths << "\n";
        sum << "steps," << r.steps << "\n";
        sum << "backend," << r.backend << "\n";
        sum << "tool_version," << r.tool_version << "\n";
        sum << "exit_code," << r.exit_code() << "\n";
        write_file(out_path + "/summary.csv", sum.str());

        std::ostringstream est;
        est.precision(17);
        est << "name,x_value,x_se,y_value,y_se,diff,combined_se,direction\n";
        auto row = [&](const PayoffComparison& p) {
            est << csv_escape(p.name) << "," << p.x.value << "," << p.x.std_error << ","
                << p.y.value << "," << p.y.std_error << "," << p.diff << "," << p.combined_se
                << "," << p.direction << "\n";
        };
        row(r.primary);
        for (const auto& p : r.family) row(p);
        write_file(out_path + "/estimates.csv", est.str());

        std::ostringstream chk;
        chk << "name,status,detail\n";
        for (const auto& c : r.checklist.items)
            chk << csv_escape(c.name) << "," << check_status_name(c.status) << ","
                << csv_escape(c.detail) << "\n";
        write_file(out_path + "/checklist.csv", chk.str());
        return;
    }
    throw ConfigError("unknown report format: " + format);
}

} // namespace semicomp
