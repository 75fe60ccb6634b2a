#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace semicomp {

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

// The reference integrator A_t = t + sum_{s in atoms, s <= t} 1: Lebesgue time
// plus unit masses at fixed times.  Characteristics are densities against A:
// on the continuous part per unit Lebesgue time, at an atom per unit mass.
struct IntegratorSpec {
    double horizon = 0.0;
    std::vector<double> atoms; // sorted, unique, inside (0, horizon]

    static IntegratorSpec lebesgue(double horizon);
    static IntegratorSpec with_atoms(double horizon, std::vector<double> atoms);

    bool has_atom(double t) const;
    double value(double t) const; // A_t
    void validate() const;
};

// Union of atoms; horizons must agree.
IntegratorSpec merge_integrators(const IntegratorSpec& a, const IntegratorSpec& b);

// ---------------------------------------------------------------------------
// Jump laws and kernels
// ---------------------------------------------------------------------------

enum class LawKind { normal, point, uniform };

// One-dimensional jump-size distribution with the moments / quantiles /
// characteristic function the quadrature and simulation layers need.
struct JumpLaw {
    LawKind kind = LawKind::point;
    double a = 0.0; // normal: mean, point: value, uniform: lower end
    double b = 0.0; // normal: sd,   point: unused, uniform: upper end

    static JumpLaw normal(double mean, double sd);
    static JumpLaw point(double value);
    static JumpLaw uniform(double lo, double hi);

    double mean() const;
    double second_moment() const;
    double fourth_moment() const;
    double abs_moment() const;
    std::complex<double> cf(double z) const;
    double pdf(double x) const;      // continuous laws only
    double quantile(double p) const;
    double sample(double u01) const { return quantile(u01); }
    bool continuous() const { return kind != LawKind::point; }
    // Central range holding all but 1e-10 of mass (quadrature support).
    std::pair<double, double> central_range() const;
};

// Lebesgue-in-time Levy density k(x) dx dt (possibly infinite activity).
struct LevyDensity {
    std::function<double(double)> k;     // k(x) for x != 0
    double support_radius = 0.0;         // k = 0 for |x| > support_radius; 0 = unbounded
    // Optional analytic exponent integral(e^{izx}-1-izx) k(x) dx; when absent
    // the characteristic exponent falls back to numeric quadrature.
    std::function<std::complex<double>(double)> exact_exponent;
};

// Finite jump measure sitting at a fixed time: total mass in (0,1] times a law.
struct AtomMeasure {
    double mass = 1.0;
    JumpLaw law;
};

// Jump compensator K.  Holds a Lebesgue-rate part (none / compound Poisson /
// Levy density) and a map of fixed-time atoms; rebasing a kernel onto a merged
// integrator produces mixed states with zero-mass foreign atoms, so both parts
// coexist in one type.
struct JumpKernel {
    enum class Lebesgue : std::uint8_t { none, compound_poisson, levy_density };
    enum class Variant : std::uint8_t { none, compound_poisson, levy_density, atom_kernel, mixed };

    Lebesgue lebesgue = Lebesgue::none;
    double intensity = 0.0; // compound Poisson rate
    JumpLaw law;            // compound Poisson jump law
    LevyDensity density;    // Levy density part
    std::map<double, AtomMeasure> atoms;

    static JumpKernel none_();
    static JumpKernel compound_poisson(double intensity, JumpLaw law);
    static JumpKernel levy(LevyDensity d);
    static JumpKernel atom_map(std::map<double, AtomMeasure> atoms);

    Variant variant() const;
    bool has_lebesgue() const { return lebesgue != Lebesgue::none; }
    bool infinite_activity() const;

    // integral_{lo < |y| <= hi} y^p K(dy) per unit time over the Lebesgue part;
    // p = 0 gives the mass.  Throws IntegrabilityError when divergent.
    double lebesgue_moment(int p, double lo = 0.0,
                           double hi = std::numeric_limits<double>::infinity()) const;
    // Same with |y|^p: nonzero for odd p on symmetric kernels, so this is the
    // form used for reach/integrability probes.
    double lebesgue_abs_moment(int p, double lo = 0.0,
                               double hi = std::numeric_limits<double>::infinity()) const;
    // integral g(y) K(dy) over the Lebesgue part restricted to |y| > lo.
    double lebesgue_integral(const std::function<double(double)>& g, double lo = 0.0) const;

    // Numeric integrability probes for the Levy-density part (always true for
    // none / compound Poisson):
    bool mass_finite() const;              // integral K(dy) < inf
    bool small_abs_moment_finite() const;  // integral_{|y|<=1} |y| K(dy) < inf
    bool tail_abs_moment_finite() const;   // integral_{|y|>1} |y| K(dy) < inf  (specialness)
    bool fourth_moment_finite() const;

    void validate(const IntegratorSpec& integrator) const;
};

// ---------------------------------------------------------------------------
// Differential characteristics and process models
// ---------------------------------------------------------------------------

using CoeffFn = std::function<double(double t, double x)>;

// Differential characteristics (b, c, K) of a one-dimensional special
// semimartingale with identity truncation, relative to an IntegratorSpec.
// drift/diffusion are Lebesgue densities; atom_drift carries the mass of B at
// fixed times; the kernel's atom map carries the fixed-time jump measures.
struct DiffChar {
    CoeffFn drift;            // b(t, x)
    CoeffFn diffusion;        // c(t, x) >= 0 (variance rate)
    JumpKernel kernel;
    CoeffFn modulation;       // scalar >= 0 scaling the Lebesgue kernel part; null = 1
    std::map<double, double> atom_drift;
    IntegratorSpec integrator;
    std::string measure = "P";

    double drift_at(double t, double x) const { return drift ? drift(t, x) : 0.0; }
    double diffusion_at(double t, double x) const { return diffusion ? diffusion(t, x) : 0.0; }
    double modulation_at(double t, double x) const { return modulation ? modulation(t, x) : 1.0; }
    double atom_drift_at(double t) const;
};

// Rebase characteristics onto a merged integrator: densities and kernels are
// unchanged; foreign atoms get zero drift mass and zero jump measure (they are
// simply absent from the maps).  Throws if the original atoms are not a
// subset of the target's.
DiffChar rebase_characteristics(const DiffChar& ch, const IntegratorSpec& merged);

enum class ModelFamily : std::uint8_t { levy, ito, grigelionis };

struct ProcessModel {
    ModelFamily family = ModelFamily::levy;
    DiffChar chars;
    double x0 = 0.0;
    bool martingale = false; // model-level claim, verified by the checklist

    // Constant-characteristics caches (levy / grigelionis Lebesgue part).
    double const_drift = 0.0;
    double const_diffusion = 0.0;

    bool pii() const { return family != ModelFamily::ito; } // independent increments
    double horizon() const { return chars.integrator.horizon; }

    static ProcessModel levy(double drift, double diffusion, JumpKernel kernel,
                             double horizon, std::string measure = "P",
                             double x0 = 0.0, bool martingale = false);
    static ProcessModel grigelionis(double drift, double diffusion, JumpKernel lebesgue_kernel,
                                    std::map<double, AtomMeasure> atoms, double horizon,
                                    std::string measure = "P", double x0 = 0.0,
                                    bool martingale = false);
    static ProcessModel ito(CoeffFn drift, CoeffFn diffusion, JumpKernel kernel,
                            CoeffFn modulation, double horizon, std::string measure = "P",
                            double x0 = 0.0);

    void validate() const;
};

// Constant triplet view of a PII model's Lebesgue part (used by levy_analytics).
struct LevyTriplet {
    double b = 0.0;
    double c = 0.0;
    JumpKernel kernel; // Lebesgue part only; atoms ignored here
};

LevyTriplet triplet_of(const ProcessModel& m);

} // namespace semicomp
