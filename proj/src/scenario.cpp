#include "semicomp/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "semicomp/errors.hpp"

#include "json.hpp"

namespace semicomp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

double num(const json& j, const char* key, const std::string& origin) {
    if (!j.contains(key) || !j[key].is_number())
        fail(origin, std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

double num_or(const json& j, const char* key, double dflt) {
    return j.contains(key) ? j[key].get<double>() : dflt;
}

JumpLaw parse_law(const json& j, const std::string& origin) {
    if (!j.is_object() || !j.contains("kind")) fail(origin, "law needs a 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "normal") return JumpLaw::normal(num(j, "mean", origin), num(j, "sdev", origin));
    if (kind == "point") return JumpLaw::point(num(j, "value", origin));
    if (kind == "uniform") return JumpLaw::uniform(num(j, "lo", origin), num(j, "hi", origin));
    fail(origin, "unknown law kind '" + kind + "'");
}

JumpKernel parse_jumps(const json& j, const std::string& origin) {
    if (j.is_null()) return JumpKernel::none_();
    if (!j.is_object() || !j.contains("type")) fail(origin, "jumps needs a 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "none") return JumpKernel::none_();
    if (type == "compound_poisson") {
        const double lam = num(j, "intensity", origin);
        if (!(lam >= 0.0)) fail(origin, "intensity must be >= 0");
        return JumpKernel::compound_poisson(lam, parse_law(j.at("law"), origin));
    }
    if (type == "exp_tempered") {
        // k(y) = c exp(-lambda |y|) / |y|  (infinite activity, finite variation)
        const double c = num(j, "c", origin);
        const double lam = num(j, "lambda", origin);
        if (!(c > 0.0) || !(lam > 0.0)) fail(origin, "exp_tempered needs c > 0, lambda > 0");
        LevyDensity d;
        d.k = [c, lam](double y) { return c * std::exp(-lam * std::fabs(y)) / std::fabs(y); };
        d.support_radius = 0.0;
        d.exact_exponent = [c, lam](double z) {
            return std::complex<double>(-c * std::log1p(z * z / (lam * lam)), 0.0);
        };
        return JumpKernel::levy(d);
    }
    if (type == "power") {
        // k(y) = c |y|^{-1-alpha} on |y| <= radius
        const double c = num(j, "c", origin);
        const double alpha = num(j, "alpha", origin);
        const double radius = num_or(j, "radius", 1.0);
        if (!(c > 0.0) || !(alpha > 0.0 && alpha < 2.0) || !(radius > 0.0))
            fail(origin, "power kernel needs c > 0, 0 < alpha < 2, radius > 0");
        LevyDensity d;
        d.k = [c, alpha, radius](double y) {
            const double ay = std::fabs(y);
            return ay <= radius ? c * std::pow(ay, -1.0 - alpha) : 0.0;
        };
        d.support_radius = radius;
        return JumpKernel::levy(d);
    }
    fail(origin, "unknown jump type '" + type + "'");
}

ProcessModel parse_model(const json& j, const std::string& origin, const std::string& measure) {
    if (!j.is_object()) fail(origin, "model must be an object");
    const std::string family = j.value("family", std::string("levy"));
    const double horizon = num(j, "horizon", origin);
    const double x0 = num_or(j, "x0", 0.0);
    const bool mart = j.value("martingale", false);
    const double drift = num_or(j, "drift", 0.0);
    const double diffusion = num_or(j, "diffusion", 0.0);
    JumpKernel kernel = parse_jumps(j.contains("jumps") ? j["jumps"] : json(), origin);

    if (family == "levy") {
        if (j.contains("atoms") && !j["atoms"].empty())
            fail(origin, "levy family takes no atoms; use family 'grigelionis'");
        return ProcessModel::levy(drift, diffusion, std::move(kernel), horizon, measure, x0,
                                  mart);
    }
    if (family == "grigelionis") {
        std::map<double, AtomMeasure> atoms;
        std::map<double, double> atom_drift;
        if (j.contains("atoms")) {
            for (const auto& a : j["atoms"]) {
                const double t = num(a, "time", origin);
                if (a.contains("law")) {
                    AtomMeasure am;
                    am.mass = num_or(a, "mass", 1.0);
                    am.law = parse_law(a["law"], origin);
                    atoms.emplace(t, am);
                } else {
                    atoms.emplace(t, AtomMeasure{0.0, JumpLaw::point(0.0)});
                }
                if (a.contains("drift")) atom_drift[t] = a["drift"].get<double>();
            }
        }
        ProcessModel m = ProcessModel::grigelionis(drift, diffusion, std::move(kernel),
                                                   std::move(atoms), horizon, measure, x0, mart);
        for (auto& [t, v] : atom_drift) m.chars.atom_drift[t] = v;
        return m;
    }
    fail(origin, "unknown model family '" + family + "'");
}

Payoff parse_payoff(const json& j, const std::string& origin) {
    if (!j.is_object() || !j.contains("type")) fail(origin, "payoff needs a 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "call") return Payoff::call(num_or(j, "strike", 0.0));
    if (type == "put") return Payoff::put(num_or(j, "strike", 0.0));
    if (type == "square") return Payoff::square();
    if (type == "abs") return Payoff::abs_value();
    if (type == "softplus") return Payoff::softplus(num_or(j, "beta", 4.0));
    if (type == "affine") return Payoff::affine(num_or(j, "a", 0.0), num_or(j, "b", 1.0));
    fail(origin, "unknown payoff type '" + type + "'");
}

} // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    Scenario sc;
    sc.spec_version = j.value("spec_version", 1);
    if (sc.spec_version != 1) fail(origin, "unsupported spec_version");
    sc.name = j.value("name", std::string("unnamed"));
    if (!j.contains("theorem")) fail(origin, "missing 'theorem'");
    sc.theorem = theorem_from_string(j["theorem"].get<std::string>());
    const std::string measure = theorem_under_emm(sc.theorem) ? "Q" : "P";
    if (!j.contains("model_x") || !j.contains("model_y"))
        fail(origin, "scenario needs 'model_x' and 'model_y'");
    sc.model_x = parse_model(j["model_x"], origin + "/model_x", measure);
    sc.model_y = parse_model(j["model_y"], origin + "/model_y", measure);
    sc.payoff = j.contains("payoff") ? parse_payoff(j["payoff"], origin) : Payoff::call(0.0);
    if (j.contains("sim")) {
        const json& s = j["sim"];
        if (s.contains("seed")) sc.sim.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("paths")) sc.sim.paths = s["paths"].get<std::size_t>();
        if (s.contains("steps")) sc.sim.steps = s["steps"].get<std::size_t>();
    }
    if (j.contains("grid")) sc.grid_h = num_or(j["grid"], "h", sc.grid_h);
    if (j.contains("assume")) {
        sc.assume.support_inclusion = j["assume"].value("support_inclusion", false);
        sc.assume.dominated_convergence = j["assume"].value("dominated_convergence", false);
    }
    if (!(sc.grid_h > 0.0)) fail(origin, "grid.h must be positive");
    if (std::fabs(sc.model_x.horizon() - sc.model_y.horizon()) > 1e-12)
        fail(origin, "models must share the horizon");
    sc.model_x.validate();
    sc.model_y.validate();
    sc.payoff.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

} // namespace semicomp
