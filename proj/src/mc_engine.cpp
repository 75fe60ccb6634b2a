#include "semicomp/mc_engine.hpp"

#include <algorithm>
#include <cmath>

#include "semicomp/errors.hpp"
#include "semicomp/kernels/kernels.hpp"
#include "semicomp/quadrature.hpp"
#include "semicomp/rng.hpp"

namespace semicomp {

namespace {

constexpr std::size_t kBlockPaths = 4096;
constexpr double kVarCutFraction = 1e-4;  // discarded small-jump variance fraction
constexpr double kMaxTailIntensity = 1e5;
constexpr double kMaxPoissonMean = 500.0;

// Numeric inverse-CDF table for the tail law k(y) 1{|y| > eps} / lambda_eps.
struct TailTable {
    std::vector<double> cum;  // normalized CDF at the nodes
    std::vector<double> y;    // jump values at the nodes

    double sample(double u) const {
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        if (it == cum.begin()) return y.front();
        if (it == cum.end()) return y.back();
        const std::size_t i = std::size_t(it - cum.begin());
        const double c0 = cum[i - 1], c1 = cum[i];
        const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        return y[i - 1] + w * (y[i] - y[i - 1]);
    }
};

TailTable build_tail_table(const LevyDensity& d, double eps) {
    const double R = d.support_radius > 0.0 ? d.support_radius : 64.0;
    if (!(R > eps)) throw ConfigError("jump density support is inside the small-jump cutoff");
    const int segs = 512;
    TailTable tab;
    tab.cum.reserve(2 * segs + 2);
    tab.y.reserve(2 * segs + 2);
    const double lstep = (std::log(R) - std::log(eps)) / segs;
    // Negative side from -R up to -eps, then positive side from eps to R.
    double acc = 0.0;
    tab.cum.push_back(0.0);
    tab.y.push_back(-R);
    for (int i = segs; i >= 1; --i) {
        const double a = std::exp(std::log(eps) + lstep * (i - 1));
        const double b = std::exp(std::log(eps) + lstep * i);
        acc += gl_integrate([&](double v) { return std::max(d.k(-v), 0.0); }, a, b, 16);
        tab.cum.push_back(acc);
        tab.y.push_back(-a);
    }
    for (int i = 1; i <= segs; ++i) {
        const double a = std::exp(std::log(eps) + lstep * (i - 1));
        const double b = std::exp(std::log(eps) + lstep * i);
        acc += gl_integrate([&](double v) { return std::max(d.k(v), 0.0); }, a, b, 16);
        tab.cum.push_back(acc);
        tab.y.push_back(b);
    }
    if (!(acc > 0.0)) throw ConfigError("jump density tail has no mass beyond the cutoff");
    for (double& c : tab.cum) c /= acc;
    return tab;
}

struct StepPlan {
    enum class JKind { none, cp, levy } kind = JKind::none;
    // compound Poisson part
    double lambda = 0.0;
    double mean_jump = 0.0;
    JumpLaw law;
    // truncated infinite-activity part
    double eps = 0.0;
    double tail_mean_rate = 0.0;  // integral_{|y|>eps} y K(dy)
    double small_var_rate = 0.0;  // integral_{|y|<=eps} y^2 K(dy)
    TailTable tail;
    // constant-coefficient fast path
    bool fast_const = false;
    double b0 = 0.0, c0 = 0.0;
};

StepPlan build_plan(const ProcessModel& model, double t0, double x0) {
    const DiffChar& ch = model.chars;
    StepPlan plan;
    switch (ch.kernel.lebesgue) {
        case JumpKernel::Lebesgue::none:
            break;
        case JumpKernel::Lebesgue::compound_poisson:
            plan.kind = StepPlan::JKind::cp;
            plan.lambda = ch.kernel.intensity;
            plan.law = ch.kernel.law;
            plan.mean_jump = ch.kernel.law.mean();
            break;
        case JumpKernel::Lebesgue::levy_density: {
            plan.kind = StepPlan::JKind::levy;
            const double total_var = ch.kernel.lebesgue_moment(2);
            int k = 2;
            double eps = std::ldexp(1.0, -k);
            for (; k <= 40; ++k) {
                eps = std::ldexp(1.0, -k);
                if (ch.kernel.lebesgue_moment(2, 0.0, eps) < kVarCutFraction * total_var) break;
            }
            double lam = ch.kernel.lebesgue_moment(0, eps);
            while (lam > kMaxTailIntensity && k > 2) {
                eps = std::ldexp(1.0, --k);
                lam = ch.kernel.lebesgue_moment(0, eps);
            }
            plan.eps = eps;
            plan.lambda = lam;
            plan.small_var_rate = ch.kernel.lebesgue_moment(2, 0.0, eps);
            plan.tail_mean_rate =
                ch.kernel.lebesgue_integral([](double y) { return y; }, eps);
            plan.tail = build_tail_table(ch.kernel.density, eps);
            break;
        }
    }
    // PII factories install constant drift/diffusion, so the whole block can
    // go through the vectorized Euler update (x + b dt) + sqrt(c dt) z, which
    // matches the general per-path expression bit for bit.
    plan.fast_const = model.pii() && !ch.modulation;
    if (plan.fast_const) {
        plan.b0 = ch.drift_at(t0, x0);
        plan.c0 = ch.diffusion_at(t0, x0);
    }
    return plan;
}

std::vector<double> make_time_grid(const ProcessModel& model, const SimConfig& cfg, double t0,
                                   std::vector<char>& atom_flag) {
    const double T = model.horizon();
    const double span = T - t0;
    std::size_t n = std::max<std::size_t>(
        1, std::size_t(std::llround(double(cfg.steps) * span / T)));
    std::vector<double> times;
    times.reserve(n + 1 + model.chars.integrator.atoms.size());
    for (std::size_t k = 0; k <= n; ++k) times.push_back(t0 + span * double(k) / double(n));
    for (double s : model.chars.integrator.atoms)
        if (s > t0 + 1e-12 && s <= T + 1e-12) times.push_back(s);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                times.end());
    times.back() = T;
    atom_flag.assign(times.size(), 0);
    for (std::size_t i = 0; i < times.size(); ++i)
        if (model.chars.integrator.has_atom(times[i]) && times[i] > t0 + 1e-12) atom_flag[i] = 1;
    return times;
}

// One continuous-part jump increment over dt for a single path (draw order per
// path: Poisson count, one uniform per jump, then the small-jump normal).
double jump_increment(const StepPlan& plan, PathStream& stream, double mod, double dt) {
    if (plan.kind == StepPlan::JKind::none || mod == 0.0) return 0.0;
    const double mean = plan.lambda * mod * dt;
    if (mean > kMaxPoissonMean)
        throw ConfigError("mc_engine: jump intensity per step too large; increase steps");
    const std::uint64_t njump = stream.next_poisson(mean);
    double sum = 0.0;
    if (plan.kind == StepPlan::JKind::cp) {
        for (std::uint64_t j = 0; j < njump; ++j) sum += plan.law.sample(stream.next_u01());
        return sum - plan.lambda * mod * plan.mean_jump * dt;
    }
    for (std::uint64_t j = 0; j < njump; ++j) sum += plan.tail.sample(stream.next_u01());
    sum -= plan.tail_mean_rate * mod * dt;
    sum += std::sqrt(std::max(plan.small_var_rate * mod * dt, 0.0)) * stream.next_normal();
    return sum;
}

double atom_increment(const DiffChar& ch, double s, PathStream& stream) {
    double incr = ch.atom_drift_at(s);
    auto it = ch.kernel.atoms.find(s);
    if (it != ch.kernel.atoms.end()) {
        const AtomMeasure& am = it->second;
        const bool occur = am.mass >= 1.0 || stream.next_u01() < am.mass;
        if (occur) incr += am.law.sample(stream.next_u01());
        incr -= am.mass * am.law.mean();
    }
    return incr;
}

template <typename PerStep>
void run_blocks(const ProcessModel& model, const SimConfig& cfg, double x0,
                const std::vector<double>& times, const std::vector<char>& atom_flag,
                const StepPlan& plan, PerStep&& per_step_hook) {
    const DiffChar& ch = model.chars;
    std::vector<double> state, z;
    std::vector<PathStream> streams;
    for (std::size_t base = 0; base < cfg.paths; base += kBlockPaths) {
        const std::size_t nb = std::min(kBlockPaths, cfg.paths - base);
        state.assign(nb, x0);
        z.assign(nb, 0.0);
        streams.clear();
        streams.reserve(nb);
        for (std::size_t p = 0; p < nb; ++p) streams.emplace_back(cfg.seed, base + p);
        per_step_hook(0, base, std::span<const double>(state.data(), nb));
        for (std::size_t i = 0; i + 1 < times.size(); ++i) {
            const double t = times[i];
            const double dt = times[i + 1] - t;
            for (std::size_t p = 0; p < nb; ++p) z[p] = streams[p].next_normal();
            if (plan.fast_const) {
                kernels::euler_update(std::span<double>(state.data(), nb),
                                      std::span<const double>(z.data(), nb), plan.b0 * dt,
                                      std::sqrt(std::max(plan.c0, 0.0) * dt));
                if (plan.kind != StepPlan::JKind::none)
                    for (std::size_t p = 0; p < nb; ++p)
                        state[p] += jump_increment(plan, streams[p], 1.0, dt);
            } else {
                for (std::size_t p = 0; p < nb; ++p) {
                    const double xp = state[p];
                    const double b = ch.drift_at(t, xp);
                    const double c = ch.diffusion_at(t, xp);
                    double xn = (xp + b * dt) + std::sqrt(std::max(c, 0.0) * dt) * z[p];
                    if (plan.kind != StepPlan::JKind::none)
                        xn += jump_increment(plan, streams[p], ch.modulation_at(t, xp), dt);
                    state[p] = xn;
                }
            }
            if (atom_flag[i + 1])
                for (std::size_t p = 0; p < nb; ++p)
                    state[p] += atom_increment(ch, times[i + 1], streams[p]);
            per_step_hook(i + 1, base, std::span<const double>(state.data(), nb));
        }
    }
}

} // namespace

Estimate summarize_samples(std::span<const double> v) {
    Estimate e;
    e.paths = v.size();
    if (v.empty()) return e;
    const double n = double(v.size());
    const double s = kernels::sum(v);
    e.value = s / n;
    if (v.size() > 1) {
        const double ss = kernels::sum_sq(v);
        const double var = std::max(ss - n * e.value * e.value, 0.0) / (n - 1.0);
        e.std_error = std::sqrt(var / n);
    }
    e.ci99 = 2.576 * e.std_error;
    return e;
}

std::vector<double> simulate_terminal(const ProcessModel& model, const SimConfig& cfg, double t0,
                                      double x0) {
    model.validate();
    const double T = model.horizon();
    if (t0 < -1e-12 || t0 > T + 1e-12)
        throw ConfigError("simulate_terminal: start time outside the horizon");
    std::vector<double> out(cfg.paths, x0);
    if (T - t0 < 1e-15 || cfg.paths == 0) return out;
    std::vector<char> atom_flag;
    const std::vector<double> times = make_time_grid(model, cfg, t0, atom_flag);
    const StepPlan plan = build_plan(model, t0, x0);
    const std::size_t last = times.size() - 1;
    run_blocks(model, cfg, x0, times, atom_flag, plan,
               [&](std::size_t step, std::size_t base, std::span<const double> st) {
                   if (step == last)
                       std::copy(st.begin(), st.end(), out.begin() + std::ptrdiff_t(base));
               });
    return out;
}

PathBundle simulate_paths(const ProcessModel& model, const SimConfig& cfg, double t0, double x0,
                          std::size_t max_paths) {
    model.validate();
    const double T = model.horizon();
    if (t0 < -1e-12 || t0 > T + 1e-12)
        throw ConfigError("simulate_paths: start time outside the horizon");
    SimConfig c = cfg;
    c.paths = std::min(cfg.paths, max_paths);
    PathBundle bundle;
    if (T - t0 < 1e-15 || c.paths == 0) {
        bundle.times = {t0};
        bundle.states.assign(1, std::vector<double>(c.paths, x0));
        return bundle;
    }
    std::vector<char> atom_flag;
    bundle.times = make_time_grid(model, c, t0, atom_flag);
    const StepPlan plan = build_plan(model, t0, x0);
    bundle.states.assign(bundle.times.size(), std::vector<double>(c.paths, 0.0));
    run_blocks(model, c, x0, bundle.times, atom_flag, plan,
               [&](std::size_t step, std::size_t base, std::span<const double> st) {
                   std::copy(st.begin(), st.end(),
                             bundle.states[step].begin() + std::ptrdiff_t(base));
               });
    return bundle;
}

Estimate estimate_terminal_from(const ProcessModel& model, const Payoff& payoff,
                                const SimConfig& cfg, double t0, double x0) {
    std::vector<double> xs = simulate_terminal(model, cfg, t0, x0);
    for (double& v : xs) v = payoff.f(v);
    return summarize_samples(xs);
}

Estimate estimate_terminal(const ProcessModel& model, const Payoff& payoff,
                           const SimConfig& cfg) {
    return estimate_terminal_from(model, payoff, cfg, 0.0, model.x0);
}

BiasCheck bias_check(const ProcessModel& model, const Payoff& payoff, const SimConfig& cfg,
                     double reference) {
    BiasCheck bc;
    bc.ladder = {64, 256, 1024};
    bc.reference = reference;
    Estimate finest;
    for (std::size_t steps : bc.ladder) {
        SimConfig c = cfg;
        c.steps = steps;  // same seed: common random numbers across rungs
        finest = estimate_terminal(model, payoff, c);
        bc.estimates.push_back(finest.value);
    }
    bc.std_error = finest.std_error;
    bc.pass = std::fabs(finest.value - reference) <= 3.0 * finest.std_error + 1e-12;
    return bc;
}

} // namespace semicomp
