#include "semicomp/levy_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "semicomp/errors.hpp"
#include "semicomp/fft.hpp"
#include "semicomp/quadrature.hpp"

namespace semicomp {

namespace {

constexpr double kTMin = 1e-4;
constexpr double kMassTol = 1e-4;
constexpr double kTailTarget = 1e-8;

// integral (e^{izy} - 1 - izy) k(y) dy by quadrature.  Log-spaced panels per
// side, subdivided linearly where the oscillation e^{izy} is faster than the
// panel resolves.
std::complex<double> density_exponent_quad(const LevyDensity& d, double z) {
    const double R = d.support_radius > 0.0 ? d.support_radius : 64.0;
    const double az = std::fabs(z);
    auto integrand_re = [&](double y, double sgn) {
        const double yy = sgn * y;
        const double ky = d.k(yy);
        return (std::cos(z * yy) - 1.0) * ky;
    };
    auto integrand_im = [&](double y, double sgn) {
        const double yy = sgn * y;
        const double ky = d.k(yy);
        return (std::sin(z * yy) - z * yy) * ky;
    };
    const double lo = 1e-14;
    const int panels = 48;
    const double la = std::log(lo), lb = std::log(R);
    const double step = (lb - la) / panels;
    double re = 0.0, im = 0.0;
    for (double sgn : {1.0, -1.0}) {
        for (int p = 0; p < panels; ++p) {
            const double a = std::exp(la + step * p);
            const double b = (p + 1 == panels) ? R : std::exp(la + step * (p + 1));
            // Subdivide so each piece spans at most ~1/4 of an oscillation.
            int pieces = std::max(1, int(az * (b - a) / 1.5) + 1);
            if (pieces > 4096) pieces = 4096;
            const double w = (b - a) / pieces;
            for (int q = 0; q < pieces; ++q) {
                const double aa = a + w * q, bb = a + w * (q + 1);
                re += gl_integrate([&](double y) { return integrand_re(y, sgn); }, aa, bb, 16);
                im += gl_integrate([&](double y) { return integrand_im(y, sgn); }, aa, bb, 16);
            }
        }
    }
    return {re, im};
}

} // namespace

std::complex<double> char_exponent(const LevyTriplet& tr, double z) {
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> psi = i * (tr.b * z) - 0.5 * tr.c * z * z;
    const JumpKernel& K = tr.kernel;
    switch (K.lebesgue) {
        case JumpKernel::Lebesgue::none:
            break;
        case JumpKernel::Lebesgue::compound_poisson:
            psi += K.intensity * (K.law.cf(z) - 1.0 - i * (z * K.law.mean()));
            break;
        case JumpKernel::Lebesgue::levy_density:
            psi += K.density.exact_exponent ? K.density.exact_exponent(z)
                                            : density_exponent_quad(K.density, z);
            break;
    }
    return psi;
}

CumulantRates cumulant_rates(const LevyTriplet& tr) {
    CumulantRates c;
    c.mean = tr.b;
    c.variance = tr.c + tr.kernel.lebesgue_moment(2);
    c.fourth = tr.kernel.fourth_moment_finite()
                   ? tr.kernel.lebesgue_moment(4)
                   : std::numeric_limits<double>::infinity();
    return c;
}

void DensitySlice::to_csv(std::ostream& os) const {
    os << "t,x,p\n";
    for (std::size_t j = 0; j < p.size(); ++j) os << t << ',' << x[j] << ',' << p[j] << '\n';
}

void DensityGrid::to_csv(std::ostream& os) const {
    os << "t,x,p\n";
    for (const auto& s : slices)
        for (std::size_t j = 0; j < s.p.size(); ++j)
            os << s.t << ',' << s.x[j] << ',' << s.p[j] << '\n';
}

namespace {

// Tail integral of |e^{t psi}| beyond z0 by dyadic extension; returns +inf on
// apparent divergence.
double cf_tail_mass(const LevyTriplet& tr, double t, double z0) {
    auto f = [&](double z) { return std::exp(t * char_exponent(tr, z).real()); };
    double total = 0.0, prev = std::numeric_limits<double>::infinity();
    double a = z0;
    for (int j = 0; j < 48; ++j) {
        const double b = 2.0 * a;
        const double seg = 2.0 * gl_integrate(f, a, b, 32); // both signs
        total += seg;
        if (seg < 1e-12 * std::max(total, 1e-300)) return total;
        if (j > 3 && seg > prev) return std::numeric_limits<double>::infinity();
        prev = seg;
        a = b;
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace

DensitySlice density_fft(const LevyTriplet& tr, double t, double h) {
    if (!(h > 0.0)) throw ConfigError("density_fft: spacing must be positive");
    if (t < kTMin) throw ConfigError("density_fft: t below t_min = 1e-4");

    const CumulantRates cum = cumulant_rates(tr);
    const double mean = t * cum.mean;
    const double var = t * cum.variance;
    // Fourth-moment Chebyshev extent: P(|S - m| > L) <= E (S-m)^4 / L^4.
    double m4 = 3.0 * var * var;
    if (std::isfinite(cum.fourth)) m4 += t * cum.fourth;
    double L = std::isfinite(m4) ? std::pow(m4 / kTailTarget, 0.25)
                                 : 1e3 * std::sqrt(var); // relaxed variance fallback
    L = std::max(L, 16.0 * h);

    std::size_t n = next_pow2(std::max<std::size_t>(4096, std::size_t(2.0 * L / h) + 1));

    // Smoothness precondition: characteristic function must be negligible at
    // the Nyquist frequency for this spacing.
    const double zmax = 3.14159265358979323846 / h;
    const double cf_at_cut = std::exp(t * char_exponent(tr, zmax).real());
    if (cf_at_cut > 1e-8)
        throw DensityUnavailable("characteristic function does not decay at the grid cutoff");
    const double tail = cf_tail_mass(tr, t, zmax);
    if (!(tail < kTailTarget * 2.0 * zmax))
        throw DensityUnavailable("characteristic function tail mass too large at the cutoff");

    // Centered inverse DFT (N/2 even):
    //   q(x_j) = (dz / 2 pi) (-1)^j FFT[(-1)^k Phi(z_k) e^{-i z_k mean}]_j.
    const double dz = 2.0 * 3.14159265358979323846 / (double(n) * h);
    std::vector<std::complex<double>> buf(n);
    const std::complex<double> i1(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double z = (double(k) - double(n) / 2.0) * dz;
        std::complex<double> v = std::exp(t * char_exponent(tr, z) - i1 * (z * mean));
        if (k & 1) v = -v;
        buf[k] = v;
    }
    fft(buf, false);

    DensitySlice slice;
    slice.t = t;
    slice.x.h = h;
    slice.x.n = n;
    slice.x.lo = mean - h * double(n) / 2.0;
    slice.p.resize(n);
    const double scale = dz / (2.0 * 3.14159265358979323846);
    double mass = 0.0, pmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double v = buf[j].real() * scale;
        if (j & 1) v = -v;
        slice.p[j] = v;
        mass += v;
        pmax = std::max(pmax, v);
    }
    slice.mass = mass * h;
    if (std::fabs(slice.mass - 1.0) > kMassTol)
        throw DensityUnavailable("density mass check failed");
    for (double v : slice.p)
        if (v < -1e-12 * std::max(pmax, 1.0))
            throw DensityUnavailable("density negativity beyond tolerance");
    return slice;
}

bool smoothness_order(const LevyTriplet& tr, double t, int n) {
    if (n < 0) throw ConfigError("smoothness_order: n must be >= 0");
    auto f = [&](double z) {
        return std::pow(std::fabs(z), n) * std::exp(t * char_exponent(tr, z).real());
    };
    double total = 2.0 * gl_integrate(f, 0.0, 1.0, 32);
    double prev = std::numeric_limits<double>::infinity();
    double a = 1.0;
    for (int j = 0; j < 60; ++j) {
        const double b = 2.0 * a;
        const double seg = 2.0 * gl_integrate(f, a, b, 32);
        total += seg;
        if (!std::isfinite(total)) return false;
        if (seg < 1e-12 * std::max(total, 1e-300)) return true;
        if (j > 3 && seg > prev) return false;
        prev = seg;
        a = b;
    }
    return false;
}

bool is_type_C(const LevyTriplet& tr) {
    if (tr.c > 0.0) return true;
    if (tr.kernel.lebesgue != JumpKernel::Lebesgue::levy_density) return false;
    return !tr.kernel.small_abs_moment_finite();
}

bool is_special(const JumpKernel& kernel) { return kernel.tail_abs_moment_finite(); }

bool small_jump_activity(const JumpKernel& kernel, double c_exp) {
    if (!kernel.has_lebesgue()) return false;
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = 0.0;
    for (int k = 4; k <= 20; ++k) {
        const double eps = std::ldexp(1.0, -k);
        double s2;
        try {
            s2 = kernel.lebesgue_moment(2, 0.0, eps);
        } catch (const IntegrabilityError&) {
            return false;
        }
        const double v = std::pow(eps, -c_exp) * s2;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (!(vmax > 0.0)) return false;
    return vmin > 1e-3 * vmax;
}

} // namespace semicomp
