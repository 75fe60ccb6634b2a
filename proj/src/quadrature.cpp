#include "semicomp/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "semicomp/errors.hpp"

namespace semicomp {

namespace {

// Nodes are the roots of P_n found by Newton iteration from the Chebyshev
// initial guess; weights w = 2 / ((1-x^2) P_n'(x)^2).
GaussRule build_rule(std::size_t n) {
    if (n == 0) throw ConfigError("gauss_legendre: order must be positive");
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P_n'(x).
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = p2;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

} // namespace

const GaussRule& gauss_legendre(std::size_t n) {
    static std::map<std::size_t, GaussRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    std::size_t n) {
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

double gl_integrate_log(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels, std::size_t n) {
    if (!(a > 0.0 && b > a)) throw ConfigError("gl_integrate_log: need 0 < a < b");
    if (panels == 0) panels = 1;
    const double la = std::log(a), lb = std::log(b);
    const double step = (lb - la) / double(panels);
    double s = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        double lo = std::exp(la + step * double(p));
        double hi = std::exp(la + step * double(p + 1));
        if (p + 1 == panels) hi = b;
        s += gl_integrate(f, lo, hi, n);
    }
    return s;
}

} // namespace semicomp
