#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "semicomp/characteristics.hpp"
#include "semicomp/grid.hpp"

namespace semicomp {

// Characteristic exponent with identity truncation:
//   psi(z) = i b z - (1/2) c z^2 + integral (e^{izy} - 1 - izy) K(dy).
// E e^{iz X_t} = e^{x0 i z} e^{t psi(z)} for the Levy part.
std::complex<double> char_exponent(const LevyTriplet& tr, double z);

// Cumulant rates of the Levy part (identity truncation):
//   mean rate = b, variance rate = c + integral y^2 K, k4 rate = integral y^4 K.
struct CumulantRates {
    double mean = 0.0;
    double variance = 0.0;
    double fourth = 0.0; // fourth cumulant rate
};
CumulantRates cumulant_rates(const LevyTriplet& tr);

struct DensitySlice {
    double t = 0.0;
    UniformGrid x;                // centered on the increment mean
    std::vector<double> p;        // density values
    double mass = 0.0;            // h * sum p
    void to_csv(std::ostream& os) const; // header: t,x,p
};

struct DensityGrid {
    std::vector<DensitySlice> slices;
    void to_csv(std::ostream& os) const;
};

// Marginal density of X_t - X_0 by FFT inversion of exp(t psi).  Throws
// DensityUnavailable when the characteristic function does not decay enough
// for the requested spacing (insufficient smoothing), and ConfigError for
// t < t_min = 1e-4.  The grid spacing h is a target; extent is sized from a
// fourth-moment tail bound with target tail mass 1e-8, and the number of
// points is the next power of two >= 2^12.
DensitySlice density_fft(const LevyTriplet& tr, double t, double h);

// Sato-type criterion for a C^n density: integral |z|^n |e^{t psi(z)}| dz < inf,
// decided by dyadic tail extension (converged when the relative increment
// drops below 1e-12; divergent tails return false).
bool smoothness_order(const LevyTriplet& tr, double t, int n);

// Type C: c > 0 or the small jumps have infinite variation.
bool is_type_C(const LevyTriplet& tr);

// Special semimartingale check: integral_{|y|>1} |y| K(dy) < inf.
bool is_special(const JumpKernel& kernel);

// Small-jump activity: liminf over eps = 2^-k, k = 4..20 of
// eps^{-c_exp} * integral_{|y|<=eps} y^2 K(dy) stays positive.
bool small_jump_activity(const JumpKernel& kernel, double c_exp);

} // namespace semicomp
