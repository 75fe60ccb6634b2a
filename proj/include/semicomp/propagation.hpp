#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "semicomp/characteristics.hpp"
#include "semicomp/grid.hpp"
#include "semicomp/mc_engine.hpp"
#include "semicomp/payoff.hpp"

namespace semicomp {

enum class FieldSource { convolution, mc };

// Left-limit rows at an integrator atom time.
struct AtomSlices {
    double time = 0.0;
    std::vector<double> g, gx, gxx, gt;
};

// The propagated expectation field g(t, x) = E[f(X_T) | X_t = x] sampled on a
// space-time grid.  Rows hold right limits in time; atom times additionally
// carry a left-limit row.  Time slices are uniform inside each inter-atom
// segment; atoms are segment boundaries.
struct PropagationField {
    FieldSource source = FieldSource::convolution;
    UniformGrid x;
    std::vector<double> times;             // slice times, times.front() = start
    std::vector<std::size_t> seg_bounds;   // slice indices of segment boundaries
    std::vector<std::vector<double>> g, gx, gxx, gt;
    std::map<std::size_t, AtomSlices> atom_left;

    double scale = 1.0;            // payoff magnitude used for tolerances
    double curvature_floor = 0.0;  // 1e-12 * max |gxx|, resolution floor
    bool resolved = true;          // cf decayed below 1e-8 at the grid cutoff
    double tau_min = 0.0;
    double h_internal = 0.0;
    std::size_t n_internal = 0;

    enum class Side { left, right };

    bool is_atom_slice(std::size_t i) const { return atom_left.count(i) != 0; }
    std::size_t locate_slice(double t) const;

    double value_at_slice(std::size_t i, double xq, Side side = Side::right) const;
    double dx_at_slice(std::size_t i, double xq, Side side = Side::right) const;
    double dxx_at_slice(std::size_t i, double xq, Side side = Side::right) const;
    double dt_at_slice(std::size_t i, double xq, Side side = Side::right) const;

    double value(double t, double xq, Side side = Side::right) const;
    double dx(double t, double xq, Side side = Side::right) const;
    double dxx(double t, double xq, Side side = Side::right) const;
    double dt(double t, double xq, Side side = Side::right) const;
};

struct FieldConfig {
    double h = 1.0 / 128;       // output spatial spacing
    std::size_t steps = 256;    // target number of time steps over the horizon
    double scan_sigmas = 8.0;   // half-width of the region of interest, in std devs
};

// Spectral propagation for models with constant coefficients: one payoff
// transform, then per slice a characteristic-function multiply and three
// inverse transforms (value, iz for the first derivative, -z^2 for the
// second).  Throws DomainError for state-dependent coefficients and
// IntegrabilityError when the needed moments do not exist.
PropagationField compute_G_convolution(const ProcessModel& model, const Payoff& payoff,
                                       const FieldConfig& cfg);

// Monte Carlo fallback field on a coarse grid (nested estimates with common
// random numbers; derivatives by finite differences).
PropagationField compute_G_mc(const ProcessModel& model, const Payoff& payoff,
                              const FieldConfig& cfg, const SimConfig& sim);

// E[g(s, x + dB + J 1_occ - m_s)]: the one-step tower integral across the atom
// at time s, evaluated against the field's right-limit rows at s.
double atom_tower(const PropagationField& field, const DiffChar& ch, double s, double xq);

struct DerivativeCheck {
    double max_err_gx = 0.0;   // scaled mismatch, iz-multiplier vs finite difference
    double max_err_gxx = 0.0;  // scaled mismatch, -z^2 multiplier vs finite difference
    bool pass = false;
};

DerivativeCheck derivative_check(const PropagationField& field);

} // namespace semicomp
