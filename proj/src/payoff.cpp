#include "semicomp/payoff.hpp"

#include <cmath>

#include "semicomp/errors.hpp"

namespace semicomp {

Payoff Payoff::constant(double v) {
    Payoff p;
    p.name = "constant";
    p.f = [v](double) { return v; };
    p.df = [](double) { return 0.0; };
    p.d2f = [](double) { return 0.0; };
    p.convex = true;
    p.increasing = true;
    p.growth = 0;
    return p;
}

Payoff Payoff::affine(double a, double b) {
    Payoff p;
    p.name = "affine";
    p.f = [a, b](double y) { return a + b * y; };
    p.df = [b](double) { return b; };
    p.d2f = [](double) { return 0.0; };
    p.convex = true;
    p.increasing = b >= 0.0;
    p.growth = b == 0.0 ? 0 : 1;
    return p;
}

Payoff Payoff::hinge(double sign, double strike) {
    Payoff p;
    p.name = sign >= 0.0 ? "hinge+" : "hinge-";
    const double s = sign >= 0.0 ? 1.0 : -1.0;
    p.f = [s, strike](double y) { return std::max(s * y - strike, 0.0); };
    p.df = [s, strike](double y) { return s * y > strike ? s : 0.0; };
    p.d2f = [](double) { return 0.0; };
    p.convex = true;
    p.increasing = s > 0.0;
    p.growth = 1;
    return p;
}

Payoff Payoff::call(double strike) {
    Payoff p = hinge(1.0, strike);
    p.name = "call";
    return p;
}

Payoff Payoff::put(double strike) {
    Payoff p = hinge(-1.0, -strike);
    p.name = "put";
    return p;
}

Payoff Payoff::square() {
    Payoff p;
    p.name = "square";
    p.f = [](double y) { return y * y; };
    p.df = [](double y) { return 2.0 * y; };
    p.d2f = [](double) { return 2.0; };
    p.convex = true;
    p.increasing = false;
    p.growth = 2;
    return p;
}

Payoff Payoff::abs_value() {
    Payoff p;
    p.name = "abs";
    p.f = [](double y) { return std::fabs(y); };
    p.df = [](double y) { return y >= 0.0 ? 1.0 : -1.0; };
    p.d2f = [](double) { return 0.0; };
    p.convex = true;
    p.increasing = false;
    p.growth = 1;
    return p;
}

Payoff Payoff::softplus(double beta) {
    Payoff p;
    p.name = "softplus";
    p.f = [beta](double y) {
        const double u = beta * y;
        if (u > 40.0) return y + std::exp(-u) / beta;
        return std::log1p(std::exp(u)) / beta;
    };
    p.df = [beta](double y) {
        const double u = beta * y;
        if (u > 40.0) return 1.0 - std::exp(-u);
        if (u < -40.0) return std::exp(u);
        return 1.0 / (1.0 + std::exp(-u));
    };
    p.d2f = [beta](double y) {
        const double u = beta * y;
        const double s = u > 40.0 ? 1.0 - std::exp(-u)
                                  : (u < -40.0 ? std::exp(u) : 1.0 / (1.0 + std::exp(-u)));
        return beta * s * (1.0 - s);
    };
    p.convex = true;
    p.increasing = true;
    p.growth = 1;
    return p;
}

void Payoff::validate() const {
    if (!f || !df || !d2f) throw ConfigError("payoff '" + name + "': missing callable");
    double scale = 1.0;
    for (int i = -6; i <= 6; ++i) {
        const double y = 0.5 * i;
        const double v = f(y);
        if (!std::isfinite(v)) throw ConfigError("payoff '" + name + "': non-finite value");
        scale = std::max(scale, std::fabs(v));
    }
    const double tol = 1e-9 * scale;
    for (int i = -6; i < 6; ++i) {
        const double a = 0.5 * i, b = a + 0.5;
        if (convex && f(0.5 * (a + b)) > 0.5 * (f(a) + f(b)) + tol)
            throw ConfigError("payoff '" + name + "': convex flag inconsistent");
        if (increasing && f(b) < f(a) - tol)
            throw ConfigError("payoff '" + name + "': increasing flag inconsistent");
    }
}

} // namespace semicomp
