#include "semicomp/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "semicomp/errors.hpp"
#include "semicomp/fft.hpp"
#include "semicomp/kernels/kernels.hpp"
#include "semicomp/levy_analytics.hpp"
#include "semicomp/quadrature.hpp"

namespace semicomp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTMin = 1e-4;
constexpr double kTailTarget = 1e-8;

double hermite(double u, double v0, double d0, double v1, double d1) {
    // d0, d1 are derivatives already scaled by the cell width.
    const double u2 = u * u, u3 = u2 * u;
    return v0 * (2.0 * u3 - 3.0 * u2 + 1.0) + d0 * (u3 - 2.0 * u2 + u) +
           v1 * (-2.0 * u3 + 3.0 * u2) + d1 * (u3 - u2);
}

// C^1 evaluation of a row from (values, derivatives).
double eval_pair(const std::vector<double>& v, const std::vector<double>& dv,
                 const UniformGrid& G, double xq) {
    if (G.n == 1) return v[0] + dv[0] * (xq - G.lo);
    if (xq <= G.lo) return v.front() + dv.front() * (xq - G.lo);
    const double hi = G.hi();
    if (xq >= hi) return v.back() + dv.back() * (xq - hi);
    const std::size_t j = G.cell(xq);
    const double u = (xq - (G.lo + G.h * double(j))) / G.h;
    return hermite(u, v[j], G.h * dv[j], v[j + 1], G.h * dv[j + 1]);
}

// Catmull-Rom evaluation of a single row.
double eval_row(const std::vector<double>& v, const UniformGrid& G, double xq) {
    if (G.n == 1) return v[0];
    const double hi = G.hi();
    if (xq <= G.lo) return v.front() + (v[1] - v[0]) / G.h * (xq - G.lo);
    if (xq >= hi) return v.back() + (v[G.n - 1] - v[G.n - 2]) / G.h * (xq - hi);
    const std::size_t j = G.cell(xq);
    const double u = (xq - (G.lo + G.h * double(j))) / G.h;
    auto tangent = [&](std::size_t i) {
        if (i == 0) return v[1] - v[0];
        if (i + 1 >= G.n) return v[G.n - 1] - v[G.n - 2];
        return 0.5 * (v[i + 1] - v[i - 1]);
    };
    return hermite(u, v[j], tangent(j), v[j + 1], tangent(j + 1));
}

bool near_time(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

// 4th-order first derivative of uniformly spaced rows; writes n output rows.
std::vector<std::vector<double>> fd_time_rows(const std::vector<const std::vector<double>*>& r,
                                              double dt) {
    const std::size_t n = r.size();
    const std::size_t m = r[0]->size();
    std::vector<std::vector<double>> out(n, std::vector<double>(m, 0.0));
    if (n < 5) throw ConfigError("time segment too short for the derivative stencil");
    const double s = 1.0 / (12.0 * dt);
    for (std::size_t j = 0; j < m; ++j) {
        auto v = [&](std::size_t i) { return (*r[i])[j]; };
        out[0][j] = s * (-25.0 * v(0) + 48.0 * v(1) - 36.0 * v(2) + 16.0 * v(3) - 3.0 * v(4));
        out[1][j] = s * (-3.0 * v(0) - 10.0 * v(1) + 18.0 * v(2) - 6.0 * v(3) + v(4));
        for (std::size_t i = 2; i + 2 < n; ++i)
            out[i][j] = s * (v(i - 2) - 8.0 * v(i - 1) + 8.0 * v(i + 1) - v(i + 2));
        out[n - 2][j] =
            s * (3.0 * v(n - 1) + 10.0 * v(n - 2) - 18.0 * v(n - 3) + 6.0 * v(n - 4) - v(n - 5));
        out[n - 1][j] = s * (25.0 * v(n - 1) - 48.0 * v(n - 2) + 36.0 * v(n - 3) -
                             16.0 * v(n - 4) + 3.0 * v(n - 5));
    }
    return out;
}

struct AtomInfo {
    double time = 0.0;
    double dB = 0.0;    // predictable drift increment at the atom
    double mass = 0.0;  // 0 when the atom carries no jump measure
    JumpLaw law;
    double mean_jump = 0.0;  // mass * E J
};

std::vector<AtomInfo> collect_atoms(const ProcessModel& model) {
    std::vector<AtomInfo> out;
    const DiffChar& ch = model.chars;
    const double T = model.horizon();
    for (double s : ch.integrator.atoms) {
        if (!(s > 1e-12 && s <= T + 1e-12)) continue;
        AtomInfo a;
        a.time = std::min(s, T);
        a.dB = ch.atom_drift_at(s);
        auto it = ch.kernel.atoms.find(s);
        if (it != ch.kernel.atoms.end()) {
            a.mass = it->second.mass;
            a.law = it->second.law;
            a.mean_jump = a.mass * a.law.mean();
        }
        out.push_back(a);
    }
    std::sort(out.begin(), out.end(),
              [](const AtomInfo& x, const AtomInfo& y) { return x.time < y.time; });
    return out;
}

struct TimeMesh {
    std::vector<double> times;
    std::vector<std::size_t> seg_bounds;  // slice indices of segment boundaries
    double tau_min = 0.0;
};

TimeMesh build_time_mesh(double T, const std::vector<AtomInfo>& atoms, std::size_t steps,
                         std::size_t min_sub) {
    std::vector<double> bounds{0.0};
    for (const auto& a : atoms)
        if (a.time < T - 1e-12) bounds.push_back(a.time);
    bounds.push_back(T);
    TimeMesh mesh;
    mesh.seg_bounds.push_back(0);
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const double len = bounds[k + 1] - bounds[k];
        std::size_t nsub =
            std::max<std::size_t>(min_sub, std::size_t(std::llround(double(steps) * len / T)));
        if (k + 2 == bounds.size()) {
            // keep the slice nearest the horizon at least t_min away
            while (nsub > 1 && len / double(nsub) < kTMin) --nsub;
            if (nsub < min_sub)
                throw ConfigError("propagation: segment before the horizon is too short");
        }
        if (mesh.times.empty()) mesh.times.push_back(bounds[k]);
        for (std::size_t i = 1; i <= nsub; ++i)
            mesh.times.push_back(bounds[k] + len * double(i) / double(nsub));
        mesh.times.back() = bounds[k + 1];
        mesh.seg_bounds.push_back(mesh.times.size() - 1);
    }
    // last segment is uniform, so this is the gap below T
    mesh.tau_min = mesh.times.back() - mesh.times[mesh.times.size() - 2];
    return mesh;
}

// Jump reach: radius beyond which the Lebesgue kernel's first-moment tail is
// negligible, capped by the density's effective support.
double kernel_reach(const JumpKernel& K) {
    switch (K.lebesgue) {
        case JumpKernel::Lebesgue::none:
            return 0.0;
        case JumpKernel::Lebesgue::compound_poisson: {
            auto [a, b] = K.law.central_range();
            return std::max(std::fabs(a), std::fabs(b));
        }
        case JumpKernel::Lebesgue::levy_density: {
            const double cap = K.density.support_radius > 0.0 ? K.density.support_radius : 64.0;
            double R = 1.0;
            while (R < cap && K.lebesgue_abs_moment(1, R) > 1e-9) R *= 2.0;
            return std::min(R, cap);
        }
    }
    return 0.0;
}

void fill_gt_rows(PropagationField& F) {
    for (std::size_t k = 0; k + 1 < F.seg_bounds.size(); ++k) {
        const std::size_t a = F.seg_bounds[k], b = F.seg_bounds[k + 1];
        const double dt = F.times[a + 1] - F.times[a];
        std::vector<const std::vector<double>*> rows;
        rows.reserve(b - a + 1);
        for (std::size_t i = a; i <= b; ++i) {
            if (i == b && F.atom_left.count(b))
                rows.push_back(&F.atom_left.at(b).g);  // left limit closes the segment
            else
                rows.push_back(&F.g[i]);
        }
        std::vector<std::vector<double>> gt = fd_time_rows(rows, dt);
        for (std::size_t i = a; i < b; ++i) F.gt[i] = std::move(gt[i - a]);
        if (F.atom_left.count(b)) F.atom_left.at(b).gt = std::move(gt[b - a]);
        if (b + 1 == F.times.size() && !F.atom_left.count(b)) F.gt[b] = std::move(gt[b - a]);
        if (b + 1 == F.times.size() && F.atom_left.count(b)) F.gt[b] = F.atom_left.at(b).gt;
    }
}

void finalize_scales(PropagationField& F) {
    double fmax = 0.0, cmax = 0.0;
    for (double v : F.g.back()) fmax = std::max(fmax, std::fabs(v));
    for (const auto& row : F.gxx)
        for (double v : row) cmax = std::max(cmax, std::fabs(v));
    F.scale = std::max(1.0, fmax);
    F.curvature_floor = 1e-12 * cmax;
}

} // namespace

std::size_t PropagationField::locate_slice(double t) const {
    if (times.empty()) throw DomainError("field has no slices");
    auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12);
    if (it == times.begin()) return 0;
    return std::size_t(it - times.begin()) - 1;
}

double PropagationField::value_at_slice(std::size_t i, double xq, Side side) const {
    if (side == Side::left && atom_left.count(i)) {
        const AtomSlices& s = atom_left.at(i);
        return eval_pair(s.g, s.gx, x, xq);
    }
    return eval_pair(g[i], gx[i], x, xq);
}

double PropagationField::dx_at_slice(std::size_t i, double xq, Side side) const {
    if (side == Side::left && atom_left.count(i)) {
        const AtomSlices& s = atom_left.at(i);
        return eval_pair(s.gx, s.gxx, x, xq);
    }
    return eval_pair(gx[i], gxx[i], x, xq);
}

double PropagationField::dxx_at_slice(std::size_t i, double xq, Side side) const {
    if (side == Side::left && atom_left.count(i)) return eval_row(atom_left.at(i).gxx, x, xq);
    return eval_row(gxx[i], x, xq);
}

double PropagationField::dt_at_slice(std::size_t i, double xq, Side side) const {
    if (side == Side::left && atom_left.count(i)) return eval_row(atom_left.at(i).gt, x, xq);
    return eval_row(gt[i], x, xq);
}

namespace {

// Row sources for the interval [t_i, t_{i+1}]: the right end uses the left
// limit when t_{i+1} is an atom.
struct EndRows {
    const std::vector<double>*g, *gx, *gxx, *gt;
};

EndRows right_end(const PropagationField& F, std::size_t ip1) {
    auto it = F.atom_left.find(ip1);
    if (it != F.atom_left.end())
        return {&it->second.g, &it->second.gx, &it->second.gxx, &it->second.gt};
    return {&F.g[ip1], &F.gx[ip1], &F.gxx[ip1], &F.gt[ip1]};
}

} // namespace

double PropagationField::value(double t, double xq, Side side) const {
    const std::size_t i = locate_slice(t);
    if (near_time(t, times[i])) return value_at_slice(i, xq, side);
    if (i + 1 >= times.size()) return value_at_slice(i, xq, Side::right);
    const double dt_cell = times[i + 1] - times[i];
    const double u = (t - times[i]) / dt_cell;
    const EndRows R = right_end(*this, i + 1);
    const double v0 = eval_pair(g[i], gx[i], x, xq);
    const double d0 = eval_row(gt[i], x, xq);
    const double v1 = eval_pair(*R.g, *R.gx, x, xq);
    const double d1 = eval_row(*R.gt, x, xq);
    return hermite(u, v0, dt_cell * d0, v1, dt_cell * d1);
}

double PropagationField::dx(double t, double xq, Side side) const {
    const std::size_t i = locate_slice(t);
    if (near_time(t, times[i])) return dx_at_slice(i, xq, side);
    if (i + 1 >= times.size()) return dx_at_slice(i, xq, Side::right);
    const double u = (t - times[i]) / (times[i + 1] - times[i]);
    const EndRows R = right_end(*this, i + 1);
    return (1.0 - u) * eval_pair(gx[i], gxx[i], x, xq) + u * eval_pair(*R.gx, *R.gxx, x, xq);
}

double PropagationField::dxx(double t, double xq, Side side) const {
    const std::size_t i = locate_slice(t);
    if (near_time(t, times[i])) return dxx_at_slice(i, xq, side);
    if (i + 1 >= times.size()) return dxx_at_slice(i, xq, Side::right);
    const double u = (t - times[i]) / (times[i + 1] - times[i]);
    const EndRows R = right_end(*this, i + 1);
    return (1.0 - u) * eval_row(gxx[i], x, xq) + u * eval_row(*R.gxx, x, xq);
}

double PropagationField::dt(double t, double xq, Side side) const {
    const std::size_t i = locate_slice(t);
    if (near_time(t, times[i])) return dt_at_slice(i, xq, side);
    if (i + 1 >= times.size()) return dt_at_slice(i, xq, Side::right);
    const double u = (t - times[i]) / (times[i + 1] - times[i]);
    const EndRows R = right_end(*this, i + 1);
    return (1.0 - u) * eval_row(gt[i], x, xq) + u * eval_row(*R.gt, x, xq);
}

PropagationField compute_G_convolution(const ProcessModel& model, const Payoff& payoff,
                                       const FieldConfig& cfg) {
    model.validate();
    payoff.validate();
    if (!model.pii())
        throw DomainError("convolution propagation requires constant coefficients");
    const DiffChar& ch = model.chars;
    if (ch.kernel.lebesgue == JumpKernel::Lebesgue::levy_density &&
        !ch.kernel.density.exact_exponent)
        throw DomainError(
            "convolution propagation needs a closed-form exponent for a density kernel");

    const double T = model.horizon();
    const LevyTriplet tr = triplet_of(model);
    const std::vector<AtomInfo> atoms = collect_atoms(model);

    // --- moment-based sizing -------------------------------------------------
    const double var_rate = tr.c + ch.kernel.lebesgue_moment(2);
    double var_total = T * var_rate;
    double kappa4 = 0.0;
    bool kappa4_ok = ch.kernel.fourth_moment_finite();
    if (kappa4_ok) kappa4 = T * ch.kernel.lebesgue_moment(4);
    double mean_disp = T * tr.b;
    double m_reach = std::fabs(T * tr.b);
    double atom_reach = 0.0;
    for (const AtomInfo& a : atoms) {
        const double ej2 = a.mass > 0.0 ? a.law.second_moment() : 0.0;
        var_total += a.mass * ej2 - a.mean_jump * a.mean_jump;
        if (kappa4_ok && a.mass > 0.0) kappa4 += a.mass * a.law.fourth_moment();
        mean_disp += a.dB;
        m_reach += std::fabs(a.dB) + std::fabs(a.mean_jump);
        if (a.mass > 0.0) {
            auto [qa, qb] = a.law.central_range();
            atom_reach = std::max({atom_reach, std::fabs(qa), std::fabs(qb)});
        }
    }
    const double sdev = std::sqrt(std::max(var_total, 1e-12));
    double L_dev;
    if (kappa4_ok) {
        const double m4 = 3.0 * var_total * var_total + kappa4;
        L_dev = std::pow(m4 / kTailTarget, 0.25);
    } else {
        L_dev = 1e3 * sdev;
    }
    const double R_jump = std::max(kernel_reach(ch.kernel), atom_reach);
    const double scan_half = cfg.scan_sigmas * sdev + m_reach + 1.0;
    const double L_out = scan_half + R_jump + 4.0 * cfg.h;
    const double c0 = model.x0 + 0.5 * mean_disp;
    const double L_k = m_reach + L_dev;

    const std::size_t n_half = std::size_t(std::ceil(L_out / cfg.h));
    PropagationField F;
    F.source = FieldSource::convolution;
    F.x.h = cfg.h;
    F.x.n = 2 * n_half + 1;
    F.x.lo = c0 - double(n_half) * cfg.h;

    // --- time mesh -----------------------------------------------------------
    TimeMesh mesh = build_time_mesh(T, atoms, cfg.steps, 8);
    F.times = mesh.times;
    F.seg_bounds = mesh.seg_bounds;
    F.tau_min = mesh.tau_min;
    const std::size_t M = F.times.size() - 1;

    // --- internal grid: refine until the cf decays at the cutoff --------------
    auto decay_at = [&](double h_int) {
        return std::exp(mesh.tau_min * char_exponent(tr, kPi / h_int).real());
    };
    int refine = 0;
    F.resolved = false;
    const double d0 = decay_at(cfg.h);
    if (d0 <= kTailTarget) {
        F.resolved = true;
    } else {
        for (int m = 1; m <= 6; ++m) {
            if (decay_at(cfg.h / std::ldexp(1.0, m)) <= kTailTarget) {
                refine = m;
                F.resolved = true;
                break;
            }
        }
        if (!F.resolved) {
            const double d6 = decay_at(cfg.h / 64.0);
            refine = d6 < 1e-3 * d0 ? 6 : 0;  // refusal to refine a flat cf
        }
    }
    const double h_int = cfg.h / std::ldexp(1.0, refine);
    const std::size_t stride = std::size_t(1) << refine;
    const double W_needed = L_out + 2.0 * L_k;
    std::size_t N = next_pow2(std::max<std::size_t>(4096, std::size_t(2.0 * W_needed / h_int) + 1));
    if (N > (std::size_t(1) << 22))
        throw ConfigError("propagation: internal transform grid too large");
    const double W = 0.5 * double(N) * h_int;
    F.h_internal = h_int;
    F.n_internal = N;

    // --- payoff samples, tapered outside the reachable band -------------------
    std::vector<std::complex<double>> S(N);
    const double U_keep = L_out + L_k;
    for (std::size_t l = 0; l < N; ++l) {
        const double u = (double(l) - double(N) / 2.0) * h_int;
        double w = 1.0;
        const double au = std::fabs(u);
        if (au > U_keep) {
            const double frac = std::min(1.0, (au - U_keep) / std::max(W - U_keep, h_int));
            w = 0.5 * (1.0 + std::cos(kPi * frac));
        }
        double v = payoff.f(c0 + u) * w;
        if (l & 1) v = -v;
        S[l] = v;
    }
    fft(S, false);

    // --- frequency-domain factors ---------------------------------------------
    const double dz = 2.0 * kPi / (double(N) * h_int);
    std::vector<double> zk(N);
    for (std::size_t k = 0; k < N; ++k) zk[k] = (double(k) - double(N) / 2.0) * dz;
    std::vector<std::complex<double>> psi(N);
    for (std::size_t k = 0; k < N; ++k) psi[k] = char_exponent(tr, zk[k]);

    auto atom_factor = [&](const AtomInfo& a) {
        std::vector<std::complex<double>> f(N);
        const std::complex<double> i1(0.0, 1.0);
        for (std::size_t k = 0; k < N; ++k) {
            std::complex<double> mix = 1.0;
            if (a.mass > 0.0) mix = (1.0 - a.mass) + a.mass * a.law.cf(zk[k]);
            f[k] = std::exp(i1 * (zk[k] * (a.dB - a.mean_jump))) * mix;
        }
        return f;
    };

    // --- allocate rows ----------------------------------------------------------
    const std::size_t n_out = F.x.n;
    F.g.assign(M + 1, {});
    F.gx.assign(M + 1, {});
    F.gxx.assign(M + 1, {});
    F.gt.assign(M + 1, std::vector<double>(n_out, 0.0));
    F.g[M].resize(n_out);
    F.gx[M].resize(n_out);
    F.gxx[M].resize(n_out);
    for (std::size_t j = 0; j < n_out; ++j) {
        const double xj = F.x[j];
        F.g[M][j] = payoff.f(xj);
        F.gx[M][j] = payoff.df(xj);
        F.gxx[M][j] = payoff.d2f(xj);
    }

    std::vector<std::complex<double>> cur(N, 1.0), prod(N), buf(N);
    const std::size_t l0 = N / 2 - n_half * stride;
    auto emit = [&](std::vector<double>& og, std::vector<double>& ogx, std::vector<double>& ogxx) {
        std::copy(S.begin(), S.end(), prod.begin());
        kernels::cmul_inplace(prod, cur);
        auto subsample = [&](std::vector<double>& dst) {
            dst.resize(n_out);
            for (std::size_t j = 0; j < n_out; ++j) {
                const std::size_t l = l0 + j * stride;
                dst[j] = (l & 1) ? -buf[l].real() : buf[l].real();
            }
        };
        std::copy(prod.begin(), prod.end(), buf.begin());
        fft(buf, true);
        subsample(og);
        for (std::size_t k = 0; k < N; ++k) buf[k] = prod[k] * std::complex<double>(0.0, zk[k]);
        fft(buf, true);
        subsample(ogx);
        for (std::size_t k = 0; k < N; ++k) buf[k] = prod[k] * (-zk[k] * zk[k]);
        fft(buf, true);
        subsample(ogxx);
    };

    // Per-segment step factors exp(dt * psi).
    std::vector<std::vector<std::complex<double>>> seg_factor(F.seg_bounds.size() - 1);
    auto seg_of_interval = [&](std::size_t i) {
        // segment index containing (t_i, t_{i+1}]
        std::size_t k = 0;
        while (F.seg_bounds[k + 1] <= i) ++k;
        return k;
    };
    for (std::size_t k = 0; k + 1 < F.seg_bounds.size(); ++k) {
        const std::size_t a = F.seg_bounds[k];
        const double dt_seg = F.times[a + 1] - F.times[a];
        seg_factor[k].resize(N);
        for (std::size_t l = 0; l < N; ++l) seg_factor[k][l] = std::exp(dt_seg * psi[l]);
    }
    std::map<double, std::vector<std::complex<double>>> atom_factors;
    for (const AtomInfo& a : atoms) atom_factors.emplace(a.time, atom_factor(a));

    for (std::size_t i = M; i-- > 0;) {
        // crossing slice i+1 downward: apply its atom factor first (left limit)
        const double t_next = F.times[i + 1];
        auto af = atom_factors.find(t_next);
        if (af != atom_factors.end()) {
            kernels::cmul_inplace(cur, af->second);
            AtomSlices& left = F.atom_left[i + 1];
            left.time = t_next;
            emit(left.g, left.gx, left.gxx);
        }
        kernels::cmul_inplace(cur, seg_factor[seg_of_interval(i)]);
        emit(F.g[i], F.gx[i], F.gxx[i]);
    }

    fill_gt_rows(F);
    finalize_scales(F);
    return F;
}

double atom_tower(const PropagationField& field, const DiffChar& ch, double s, double xq) {
    const std::size_t i = field.locate_slice(s);
    if (!near_time(s, field.times[i]))
        throw DomainError("atom_tower: time is not a field slice");
    const double dB = ch.atom_drift_at(s);
    auto it = ch.kernel.atoms.find(s);
    if (it == ch.kernel.atoms.end()) return field.value_at_slice(i, xq + dB);
    const AtomMeasure& am = it->second;
    const double base = xq + dB - am.mass * am.law.mean();
    double val = (1.0 - am.mass) * field.value_at_slice(i, base);
    if (am.law.kind == LawKind::point) {
        val += am.mass * field.value_at_slice(i, base + am.law.a);
    } else {
        auto [qa, qb] = am.law.central_range();
        val += am.mass *
               gl_integrate(
                   [&](double j) { return field.value_at_slice(i, base + j) * am.law.pdf(j); },
                   qa, qb, 64);
    }
    return val;
}

PropagationField compute_G_mc(const ProcessModel& model, const Payoff& payoff,
                              const FieldConfig& cfg, const SimConfig& sim) {
    model.validate();
    payoff.validate();
    const double T = model.horizon();
    const std::vector<AtomInfo> atoms = collect_atoms(model);

    // Pilot simulation for sizing.
    SimConfig pilot = sim;
    pilot.paths = std::min<std::size_t>(2048, std::max<std::size_t>(512, sim.paths / 16));
    std::vector<double> xs = simulate_terminal(model, pilot, 0.0, model.x0);
    const Estimate pe = summarize_samples(xs);
    double var = 0.0;
    for (double v : xs) var += (v - pe.value) * (v - pe.value);
    var = xs.size() > 1 ? var / double(xs.size() - 1) : 0.0;
    const double sdev = std::sqrt(std::max(var, 1e-12));
    const double L_out = cfg.scan_sigmas * sdev + std::fabs(pe.value - model.x0) + 1.0;

    PropagationField F;
    F.source = FieldSource::mc;
    F.resolved = false;
    const std::size_t n_out = 41;
    F.x.n = n_out;
    F.x.h = 2.0 * L_out / double(n_out - 1);
    F.x.lo = model.x0 + 0.5 * (pe.value - model.x0) - L_out;

    TimeMesh mesh = build_time_mesh(T, atoms, std::max<std::size_t>(12, cfg.steps / 16), 5);
    F.times = mesh.times;
    F.seg_bounds = mesh.seg_bounds;
    F.tau_min = mesh.tau_min;
    const std::size_t M = F.times.size() - 1;

    const std::size_t paths_c = std::max<std::size_t>(2000, sim.paths / 64);
    F.g.assign(M + 1, std::vector<double>(n_out, 0.0));
    F.gx.assign(M + 1, std::vector<double>(n_out, 0.0));
    F.gxx.assign(M + 1, std::vector<double>(n_out, 0.0));
    F.gt.assign(M + 1, std::vector<double>(n_out, 0.0));
    for (std::size_t j = 0; j < n_out; ++j) {
        F.g[M][j] = payoff.f(F.x[j]);
        F.gx[M][j] = payoff.df(F.x[j]);
        F.gxx[M][j] = payoff.d2f(F.x[j]);
    }
    for (std::size_t i = 0; i < M; ++i) {
        const double t = F.times[i];
        SimConfig c = sim;
        c.paths = paths_c;
        c.steps = std::max<std::size_t>(8, std::size_t(double(sim.steps) * (T - t) / T));
        for (std::size_t j = 0; j < n_out; ++j)
            F.g[i][j] = estimate_terminal_from(model, payoff, c, t, F.x[j]).value;
    }
    // spatial derivatives by 4th-order differences (common random numbers keep
    // neighbouring estimates correlated)
    auto fd_row = [&](const std::vector<double>& v, std::vector<double>& d1,
                      std::vector<double>& d2) {
        const double h = F.x.h;
        const std::size_t n = v.size();
        d1[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
        d1[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
        d1[n - 2] =
            (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) /
            (12.0 * h);
        d1[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] +
                     3.0 * v[n - 5]) /
                    (12.0 * h);
        d2[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h);
        d2[1] = (v[0] - 2.0 * v[1] + v[2]) / (h * h);
        d2[n - 2] = (v[n - 1] - 2.0 * v[n - 2] + v[n - 3]) / (h * h);
        d2[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (h * h);
        for (std::size_t j = 2; j + 2 < n; ++j) {
            d1[j] = (v[j - 2] - 8.0 * v[j - 1] + 8.0 * v[j + 1] - v[j + 2]) / (12.0 * h);
            d2[j] = (-v[j - 2] + 16.0 * v[j - 1] - 30.0 * v[j] + 16.0 * v[j + 1] - v[j + 2]) /
                    (12.0 * h * h);
        }
    };
    for (std::size_t i = 0; i < M; ++i) fd_row(F.g[i], F.gx[i], F.gxx[i]);

    // Atom left limits from the tower integral against the right-limit rows.
    for (const AtomInfo& a : atoms) {
        const std::size_t idx = F.locate_slice(a.time);
        AtomSlices left;
        left.time = a.time;
        left.g.assign(n_out, 0.0);
        left.gx.assign(n_out, 0.0);
        left.gxx.assign(n_out, 0.0);
        for (std::size_t j = 0; j < n_out; ++j)
            left.g[j] = atom_tower(F, model.chars, a.time, F.x[j]);
        fd_row(left.g, left.gx, left.gxx);
        F.atom_left[idx] = std::move(left);
    }
    fill_gt_rows(F);
    finalize_scales(F);
    return F;
}

DerivativeCheck derivative_check(const PropagationField& field) {
    DerivativeCheck out;
    const std::size_t M = field.times.size() - 1;
    const double h = field.x.h;
    std::vector<std::size_t> probes{M / 4, M / 2, (3 * M) / 4};
    for (std::size_t i : probes) {
        if (field.is_atom_slice(i) || field.g[i].empty()) continue;
        const std::vector<double>& g = field.g[i];
        const std::vector<double>& gx = field.gx[i];
        const std::vector<double>& gxx = field.gxx[i];
        double gx_norm = 1e-12, gxx_norm = 1e-12;
        for (double v : gx) gx_norm = std::max(gx_norm, std::fabs(v));
        for (double v : gxx) gxx_norm = std::max(gxx_norm, std::fabs(v));
        for (std::size_t j = 2; j + 2 < g.size(); ++j) {
            const double fd1 = (g[j - 2] - 8.0 * g[j - 1] + 8.0 * g[j + 1] - g[j + 2]) / (12.0 * h);
            const double fd2 =
                (-g[j - 2] + 16.0 * g[j - 1] - 30.0 * g[j] + 16.0 * g[j + 1] - g[j + 2]) /
                (12.0 * h * h);
            out.max_err_gx = std::max(out.max_err_gx, std::fabs(fd1 - gx[j]) / gx_norm);
            out.max_err_gxx = std::max(out.max_err_gxx, std::fabs(fd2 - gxx[j]) / gxx_norm);
        }
    }
    const double tol = field.source == FieldSource::convolution ? 1e-3 : 0.25;
    out.pass = out.max_err_gx <= tol && out.max_err_gxx <= tol;
    return out;
}

} // namespace semicomp
