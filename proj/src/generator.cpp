#include "semicomp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "semicomp/errors.hpp"
#include "semicomp/quadrature.hpp"

namespace semicomp {

namespace {

double kernel_tail_radius(const JumpKernel& K) {
    const double cap = K.density.support_radius > 0.0 ? K.density.support_radius : 64.0;
    double R = 1.0;
    while (R < cap && K.lebesgue_abs_moment(1, R) > 1e-9) R *= 2.0;
    return std::min(R, cap);
}

} // namespace

JumpIntegrator::JumpIntegrator(const JumpKernel& kernel, double y_cut)
    : kernel_(&kernel), y_cut_(y_cut) {
    if (kernel.lebesgue == JumpKernel::Lebesgue::levy_density) {
        small_m2_ = kernel.lebesgue_moment(2, 0.0, y_cut_);
        reach_ = kernel_tail_radius(kernel);
        if (reach_ <= y_cut_) reach_ = 2.0 * y_cut_;
    }
}

template <bool Abs>
double JumpIntegrator::run(const PropagationField& f, std::size_t slice, double x, double mod,
                           PropagationField::Side side) const {
    if (mod == 0.0) return 0.0;
    const JumpKernel& K = *kernel_;
    if (K.lebesgue == JumpKernel::Lebesgue::none) return 0.0;
    const double g0 = f.value_at_slice(slice, x, side);
    const double gx0 = f.dx_at_slice(slice, x, side);
    auto H = [&](double y) {
        double v = f.value_at_slice(slice, x + y, side) - g0 - y * gx0;
        if constexpr (Abs) v = std::fabs(v);
        return v;
    };
    if (K.lebesgue == JumpKernel::Lebesgue::compound_poisson) {
        double e;
        if (K.law.kind == LawKind::point) {
            e = H(K.law.a);
        } else {
            auto [qa, qb] = K.law.central_range();
            e = gl_integrate([&](double y) { return H(y) * K.law.pdf(y); }, qa, qb, 64);
        }
        return mod * K.intensity * e;
    }
    // density kernel: second-order core below the cut, log-panel tails above
    double core = 0.5 * small_m2_ * f.dxx_at_slice(slice, x, side);
    if constexpr (Abs) core = std::fabs(core);
    double tail = 0.0;
    for (double sgn : {1.0, -1.0})
        tail += gl_integrate_log(
            [&](double y) { return H(sgn * y) * std::max(K.density.k(sgn * y), 0.0); }, y_cut_,
            reach_, 20, 8);
    return mod * (core + tail);
}

double JumpIntegrator::integral(const PropagationField& f, std::size_t slice, double x,
                                double mod, PropagationField::Side side) const {
    return run<false>(f, slice, x, mod, side);
}

double JumpIntegrator::abs_integral(const PropagationField& f, std::size_t slice, double x,
                                    double mod, PropagationField::Side side) const {
    return run<true>(f, slice, x, mod, side);
}

GeneratorTerms generator_terms(const PropagationField& field, const DiffChar& ch,
                               const JumpIntegrator& ji, std::size_t slice, double x) {
    const double t = field.times[slice];
    GeneratorTerms out;
    out.gt = field.dt_at_slice(slice, x);
    out.drift = ch.drift_at(t, x) * field.dx_at_slice(slice, x);
    out.diffusion = 0.5 * ch.diffusion_at(t, x) * field.dxx_at_slice(slice, x);
    out.jump = ji.integral(field, slice, x, ch.modulation_at(t, x));
    out.u = out.gt + out.diffusion + out.jump;
    out.ubar = out.u + out.drift;
    return out;
}

double atom_residual(const PropagationField& field, const DiffChar& ch, double s, double x) {
    const std::size_t i = field.locate_slice(s);
    return atom_tower(field, ch, s, x) -
           field.value_at_slice(i, x, PropagationField::Side::left);
}

ResidualScan backward_residual_scan(const PropagationField& field, const ProcessModel& model) {
    const DiffChar& ch = model.chars;
    ResidualScan scan;
    scan.scale = field.scale;
    const double T = field.times.back();
    const double t0 = field.times.front();
    const double extent = field.x.hi() - field.x.lo;
    const double margin = extent / 8.0;
    scan.x_lo = field.x.lo + margin;
    scan.x_hi = field.x.hi() - margin;
    const double dt_base = (T - t0) / double(std::max<std::size_t>(field.times.size() - 1, 1));
    scan.t_hi = T - std::max(8.0 * dt_base, (T - t0) / 32.0);

    JumpIntegrator ji(ch.kernel, field.x.h);

    // Divergence probe for infinite-activity kernels: halving the small-jump
    // cut must not move the integral materially.
    if (ch.kernel.infinite_activity()) {
        JumpIntegrator fine(ch.kernel, 0.5 * field.x.h);
        const std::size_t mid = field.times.size() / 2;
        const double xc = 0.5 * (scan.x_lo + scan.x_hi);
        const double j1 = ji.integral(field, mid, xc);
        const double j2 = fine.integral(field, mid, xc);
        if (std::fabs(j1 - j2) > 0.25 * (std::fabs(j1) + std::fabs(j2)) + 1e-6 * scan.scale) {
            scan.jump_skipped = true;
            return scan;
        }
    }

    // x-nodes: strided interior grid columns
    std::vector<std::size_t> cols;
    {
        std::size_t j_lo = field.x.cell(scan.x_lo) + 1;
        std::size_t j_hi = field.x.cell(scan.x_hi);
        if (j_hi <= j_lo) throw ConfigError("residual scan: interior region is empty");
        const std::size_t stride = std::max<std::size_t>(1, (j_hi - j_lo) / 160);
        for (std::size_t j = j_lo; j <= j_hi; j += stride) cols.push_back(j);
    }

    for (std::size_t i = 0; i + 1 < field.times.size(); ++i) {
        const double t = field.times[i];
        if (t > scan.t_hi) break;
        if (field.is_atom_slice(i)) {
            for (std::size_t j : cols) {
                const double r = atom_residual(field, ch, t, field.x[j]);
                scan.max_atom = std::max(scan.max_atom, std::fabs(r));
                ++scan.points;
            }
            continue;
        }
        for (std::size_t j : cols) {
            const GeneratorTerms gt = generator_terms(field, ch, ji, i, field.x[j]);
            scan.max_abs_u = std::max(scan.max_abs_u, std::fabs(gt.u));
            scan.max_abs_ubar = std::max(scan.max_abs_ubar, std::fabs(gt.ubar));
            ++scan.points;
        }
    }
    return scan;
}

bool h_field_integrable(const JumpKernel& kernel, int growth_degree) {
    if (kernel.lebesgue != JumpKernel::Lebesgue::levy_density) return true;
    if (kernel.density.support_radius > 0.0) return true; // compact support
    const int p = std::max(1, growth_degree);
    if (p == 1) return kernel.tail_abs_moment_finite();
    // Tail probe for |y|^p: integrate over doubling shells (2^j, 2^{j+1}] and
    // fit the log2 slope of the shell values; the tail moment is finite iff
    // the shells decay geometrically.
    std::vector<double> m(24, 0.0);
    bool all_zero = true;
    for (int j = 0; j < 24; ++j) {
        const double lo = std::ldexp(1.0, j), hi = 2.0 * lo;
        auto f = [&](double y) { return std::pow(std::fabs(y), p) * kernel.density.k(y); };
        m[std::size_t(j)] = gl_integrate(f, lo, hi, 16) + gl_integrate(f, -hi, -lo, 16);
        if (m[std::size_t(j)] > 0.0) all_zero = false;
    }
    std::vector<std::pair<double, double>> pts;
    for (int j = 16; j < 24; ++j)
        if (m[std::size_t(j)] > 0.0) pts.emplace_back(double(j), std::log2(m[std::size_t(j)]));
    if (pts.size() < 2) return true;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
    const double n = double(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return all_zero || slope < -0.05;
}

} // namespace semicomp
