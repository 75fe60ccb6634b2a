#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace semicomp {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule of order n; computed once per n and cached.
const GaussRule& gauss_legendre(std::size_t n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    std::size_t n = 16);

// Integrate f over [a, b] (0 < a < b) with Gauss-Legendre panels that are
// uniform in log(x).  Used for kernel integrals with power-law behaviour
// near the origin.
double gl_integrate_log(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels, std::size_t n = 16);

} // namespace semicomp
