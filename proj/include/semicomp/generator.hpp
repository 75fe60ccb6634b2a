#pragma once

#include <cstddef>

#include "semicomp/characteristics.hpp"
#include "semicomp/propagation.hpp"

namespace semicomp {

// Quadrature of H(x, y) = g(t, x+y) - g(t, x) - y gx(t, x) against the
// Lebesgue part of a jump kernel.  For a density kernel the band |y| <= y_cut
// is replaced by the second-order term (restricted second moment times
// gxx / 2); the tail uses log-spaced panels out to the kernel reach.
class JumpIntegrator {
  public:
    JumpIntegrator(const JumpKernel& kernel, double y_cut);

    double integral(const PropagationField& f, std::size_t slice, double x, double mod = 1.0,
                    PropagationField::Side side = PropagationField::Side::right) const;
    // Same quadrature applied to |H|; used for integrability probes.
    double abs_integral(const PropagationField& f, std::size_t slice, double x,
                        double mod = 1.0,
                        PropagationField::Side side = PropagationField::Side::right) const;

    double y_cut() const { return y_cut_; }

  private:
    template <bool Abs>
    double run(const PropagationField& f, std::size_t slice, double x, double mod,
               PropagationField::Side side) const;

    const JumpKernel* kernel_;
    double y_cut_ = 0.0;
    double small_m2_ = 0.0;  // restricted second moment below the cut
    double reach_ = 0.0;
};

struct GeneratorTerms {
    double gt = 0.0;
    double drift = 0.0;      // b gx
    double diffusion = 0.0;  // c gxx / 2
    double jump = 0.0;
    double u = 0.0;     // gt + diffusion + jump   (drift-free form)
    double ubar = 0.0;  // u + drift               (full backward operator)
};

GeneratorTerms generator_terms(const PropagationField& field, const DiffChar& ch,
                               const JumpIntegrator& ji, std::size_t slice, double x);

// Tower mismatch across the atom at time s: E[g(s, x + dB + jump)] - g(s-, x).
double atom_residual(const PropagationField& field, const DiffChar& ch, double s, double x);

struct ResidualScan {
    double max_abs_u = 0.0;
    double max_abs_ubar = 0.0;
    double max_atom = 0.0;
    double x_lo = 0.0, x_hi = 0.0;  // scanned spatial interior
    double t_hi = 0.0;              // scan excludes times beyond this
    std::size_t points = 0;
    bool jump_skipped = false;  // divergence probe failed; scan not meaningful
    double scale = 1.0;
};

// Evaluates the backward operator residuals of the model's own field over the
// interior region (spatial margin of one eighth of the extent on each side,
// terminal layer max(8 dt, T/32) excluded).
ResidualScan backward_residual_scan(const PropagationField& field, const ProcessModel& model);

// Whether the H-field of a payoff with the given polynomial growth degree is
// kernel-integrable (tail moment of that order exists).
bool h_field_integrable(const JumpKernel& kernel, int growth_degree);

} // namespace semicomp
