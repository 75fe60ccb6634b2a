#include "semicomp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "semicomp/errors.hpp"
#include "semicomp/kernels/kernels.hpp"
#include "semicomp/propagation.hpp"

namespace semicomp {

namespace {

GridInfo grid_info(const PropagationField& f) {
    GridInfo g;
    g.source = f.source == FieldSource::convolution ? "convolution" : "mc";
    g.h = f.x.h;
    g.n = f.x.n;
    g.h_internal = f.h_internal;
    g.n_internal = f.n_internal;
    g.slices = f.times.size();
    g.resolved = f.resolved;
    return g;
}

PropagationField compute_field(const ProcessModel& model, const Payoff& payoff,
                               const FieldConfig& fc, const SimConfig& sim) {
    if (model.pii()) {
        try {
            return compute_G_convolution(model, payoff, fc);
        } catch (const DensityUnavailable&) {
        } catch (const DomainError&) {
        } catch (const IntegrabilityError&) {
        }
    }
    return compute_G_mc(model, payoff, fc, sim);
}

PayoffComparison compare_payoff(const Payoff& p, const std::vector<double>& sx,
                                const std::vector<double>& sy) {
    PayoffComparison pc;
    pc.name = p.name;
    std::vector<double> vx(sx.size()), vy(sy.size());
    for (std::size_t i = 0; i < sx.size(); ++i) vx[i] = p.f(sx[i]);
    for (std::size_t i = 0; i < sy.size(); ++i) vy[i] = p.f(sy[i]);
    pc.x = summarize_samples(vx);
    pc.y = summarize_samples(vy);
    pc.diff = pc.y.value - pc.x.value;
    pc.combined_se = std::hypot(pc.x.std_error, pc.y.std_error);
    const double slack = 3.0 * pc.combined_se + 1e-14 * (std::fabs(pc.x.value) + 1.0);
    pc.direction = pc.diff > slack ? 1 : (pc.diff < -slack ? -1 : 0);
    return pc;
}

} // namespace

ComparisonReport run_scenario(const Scenario& sc_in, const RunOptions& opt) {
    Scenario sc = sc_in;
    if (opt.seed) sc.sim.seed = *opt.seed;
    if (opt.paths) sc.sim.paths = *opt.paths;
    if (opt.steps) sc.sim.steps = *opt.steps;
    if (opt.grid_h) sc.grid_h = *opt.grid_h;

    ComparisonReport rep;
    rep.scenario_name = sc.name;
    rep.theorem = sc.theorem;
    rep.spec_version = sc.spec_version;
    rep.seed = sc.sim.seed;
    rep.paths = sc.sim.paths;
    rep.steps = sc.sim.steps;
    rep.backend = kernels::backend().name;
    rep.tool_version = kToolVersion;

    const double tol_ord = 1e-9 * opt.tolerance_scale;

    std::string stage = "setup";
    try {
        stage = "merge";
        ProcessModel X = sc.model_x;
        ProcessModel Y = sc.model_y;
        const IntegratorSpec merged =
            merge_integrators(X.chars.integrator, Y.chars.integrator);
        X.chars = rebase_characteristics(X.chars, merged);
        Y.chars = rebase_characteristics(Y.chars, merged);

        stage = "field";
        FieldConfig fc;
        fc.h = sc.grid_h;
        fc.steps = sc.sim.steps;
        const PropagationField fx = compute_field(X, sc.payoff, fc, sc.sim);
        const PropagationField fy = compute_field(Y, sc.payoff, fc, sc.sim);
        rep.grid_x = grid_info(fx);
        rep.grid_y = grid_info(fy);
        rep.conv_available = fx.source == FieldSource::convolution &&
                             fy.source == FieldSource::convolution;
        rep.conv_x = fx.value_at_slice(0, X.x0);
        rep.conv_y = fy.value_at_slice(0, Y.x0);

        stage = "residual";
        rep.residual_x = backward_residual_scan(fx, X);
        rep.residual_y = backward_residual_scan(fy, Y);

        stage = "structure";
        rep.structure_applicable =
            sc.theorem != TheoremId::general_emm && sc.theorem != TheoremId::general_p;
        if (rep.structure_applicable) {
            rep.structure = compare_structure(X, Y, sc.theorem);
            rep.verdict_structural = rep.structure.combined;
        } else {
            rep.structure.detail = "structural criterion not used by this theorem";
            rep.verdict_structural = OrderStatus::equal;  // neutral in the combination
        }

        stage = "linking";
        rep.linking = linking_drift_scan(fx, X, Y, sc.theorem, tol_ord);
        if (rep.linking.resolved == 0)
            rep.verdict_linking = OrderStatus::incomparable;
        else if (rep.linking.violations == 0)
            rep.verdict_linking = OrderStatus::ordered;
        else if (rep.linking.fraction >= 0.99)
            rep.verdict_linking = OrderStatus::reversed;
        else
            rep.verdict_linking = OrderStatus::incomparable;

        stage = "hypotheses";
        rep.checklist =
            check_theorem_hypotheses(X, Y, sc.theorem, &fx, &rep.residual_x, sc.assume);

        stage = "mc";
        const std::vector<double> sx = simulate_terminal(X, sc.sim, 0.0, X.x0);
        const std::vector<double> sy = simulate_terminal(Y, sc.sim, 0.0, Y.x0);
        rep.primary = compare_payoff(sc.payoff, sx, sy);
        for (const Payoff& p : test_function_family(X, Y, sc.theorem))
            rep.family.push_back(compare_payoff(p, sx, sy));
        SimConfig bias_cfg = sc.sim;
        bias_cfg.paths = std::min<std::size_t>(sc.sim.paths, 25000);
        rep.bias_x = bias_check(X, sc.payoff, bias_cfg, rep.primary.x.value);
        rep.bias_y = bias_check(Y, sc.payoff, bias_cfg, rep.primary.y.value);

        bool any_rev = rep.primary.direction > 0;
        bool any_ord = rep.primary.direction < 0;
        for (const auto& p : rep.family) {
            if (p.direction > 0) any_rev = true;
            if (p.direction < 0) any_ord = true;
        }
        if (any_rev && any_ord)
            rep.verdict_mc = OrderStatus::incomparable;
        else if (any_rev)
            rep.verdict_mc = OrderStatus::reversed;
        else if (any_ord)
            rep.verdict_mc = OrderStatus::ordered;
        else
            rep.verdict_mc = OrderStatus::equal;

        stage = "conclude";
        rep.verdict = meet(rep.verdict_structural, meet(rep.verdict_linking, rep.verdict_mc));

        if (!rep.checklist.acceptable()) {
            rep.conclusion = Conclusion::inconclusive;
            std::string names;
            for (const auto& c : rep.checklist.items)
                if (c.status == CheckStatus::failed) names += (names.empty() ? "" : ", ") + c.name;
            rep.detail = "hypothesis check failed: " + names;
        } else {
            const bool mc_reversal = rep.primary.direction > 0 ||
                                     std::any_of(rep.family.begin(), rep.family.end(),
                                                 [](const PayoffComparison& p) {
                                                     return p.direction > 0;
                                                 });
            const bool linking_violation = rep.linking.violations > 0;
            const bool ordered_ok = rep.verdict == OrderStatus::ordered ||
                                    rep.verdict == OrderStatus::equal;
            if (mc_reversal || linking_violation) {
                rep.conclusion = Conclusion::contradicted;
                rep.detail = mc_reversal && linking_violation
                                 ? "Monte Carlo reversal and linking violations"
                                 : (mc_reversal ? "significant Monte Carlo reversal"
                                                : "linking scan violations");
            } else if (rep.primary.direction <= 0 && ordered_ok) {
                rep.conclusion = Conclusion::confirmed;
                rep.detail = rep.checklist.any_assumed()
                                 ? "order confirmed (some hypotheses assumed)"
                                 : "order confirmed";
            } else {
                rep.conclusion = Conclusion::inconclusive;
                rep.detail = "evidence mixed: verdicts " +
                             std::string(order_status_name(rep.verdict_structural)) + "/" +
                             order_status_name(rep.verdict_linking) + "/" +
                             order_status_name(rep.verdict_mc);
            }
        }
    } catch (const std::exception& e) {
        rep.conclusion = Conclusion::inconclusive;
        rep.failed_stage = stage;
        rep.detail = std::string("stage '") + stage + "' failed: " + e.what();
    }
    return rep;
}

} // namespace semicomp
