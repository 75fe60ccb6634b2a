#include <cmath>
#include <map>

#include "doctest.h"

#include "semicomp/characteristics.hpp"
#include "semicomp/errors.hpp"
#include "semicomp/generator.hpp"
#include "semicomp/payoff.hpp"
#include "semicomp/propagation.hpp"
#include "support/oracles.hpp"

using namespace semicomp;

namespace {

double bach(double x, double s) { return oracles::bachelier_call(x, 0.0, s); }

// log-spaced Simpson reference for integral H(x, y) |y|^{-3/2} dy over
// 0 < |y| <= 1 against the exact Bachelier surface at tau = 1.
double simpson_power_ref(double x) {
    const double g0 = bach(x, 0.3);
    const double gx0 = oracles::norm_cdf(x / 0.3);
    double total = 0.0;
    for (double sgn : {1.0, -1.0}) {
        const int n = 4000;
        const double la = std::log(1e-10), lb = 0.0, h = (lb - la) / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double y = std::exp(la + h * i);
            const double H = bach(x + sgn * y, 0.3) - g0 - sgn * y * gx0;
            const double f = H * std::pow(y, -1.5) * y; // dy = y dlog(y)
            acc += ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
        }
        total += acc * h / 3.0;
    }
    return total;
}

} // namespace

TEST_SUITE("generator") {
    TEST_CASE("backward residual vanishes on the martingale Bachelier field") {
        const auto m = ProcessModel::levy(0.0, 0.09, JumpKernel::none_(), 1.0, "Q", 0.0, true);
        FieldConfig cfg;
        cfg.steps = 128;
        const PropagationField F = compute_G_convolution(m, Payoff::call(0.0), cfg);
        const ResidualScan s = backward_residual_scan(F, m);
        CHECK(!s.jump_skipped);
        CHECK(s.points > 1000);
        CHECK(s.x_lo < s.x_hi);
        CHECK(s.t_hi < 1.0);
        CHECK(s.scale >= 1.0);
        CHECK(s.max_abs_u < 1e-4);
        CHECK(s.max_abs_ubar < 1e-4); // b = 0: both operator forms coincide
        CHECK(s.max_atom == 0.0);
    }

    TEST_CASE("drifted model: full operator vanishes, drift-free form does not") {
        const auto m = ProcessModel::levy(0.2, 0.09, JumpKernel::none_(), 1.0, "P", 0.0);
        FieldConfig cfg;
        cfg.steps = 128;
        const PropagationField F = compute_G_convolution(m, Payoff::call(0.0), cfg);
        const ResidualScan s = backward_residual_scan(F, m);
        CHECK(s.max_abs_ubar < 1e-4);
        CHECK(s.max_abs_u > 0.05); // u is missing b g_x ~ 0.2 Phi(d)

        // Term decomposition identities at a probe point.
        JumpIntegrator ji(m.chars.kernel, F.x.h);
        const GeneratorTerms gt = generator_terms(F, m.chars, ji, F.times.size() / 2, 0.1);
        CHECK(gt.u == gt.gt + gt.diffusion + gt.jump);
        CHECK(gt.ubar == gt.u + gt.drift);
        CHECK(gt.jump == 0.0);
        const double tau = 1.0 - F.times[F.times.size() / 2];
        const double want_gx = oracles::norm_cdf((0.1 + 0.2 * tau) / (0.3 * std::sqrt(tau)));
        CHECK(gt.drift == doctest::Approx(0.2 * want_gx).epsilon(1e-3));
    }

    TEST_CASE("jump integrator: compound Poisson closed form on the Bachelier surface") {
        const auto m = ProcessModel::levy(0.0, 0.09, JumpKernel::none_(), 1.0, "Q", 0.0, true);
        FieldConfig cfg;
        cfg.steps = 128;
        const PropagationField F = compute_G_convolution(m, Payoff::call(0.0), cfg);
        const JumpKernel cp = JumpKernel::compound_poisson(1.5, JumpLaw::normal(0.0, 0.3));
        JumpIntegrator ji(cp, F.x.h);
        CHECK(ji.y_cut() == F.x.h);
        for (double x : {-0.5, -0.2, 0.0, 0.3, 0.6}) {
            // E H(x, Y) = E g(x+Y) - g(x) for the mean-zero law: variances add.
            const double want = 1.5 * (bach(x, std::sqrt(0.18)) - bach(x, 0.3));
            CHECK(std::fabs(ji.integral(F, 0, x) - want) < 3e-5);
            CHECK(ji.abs_integral(F, 0, x) >= std::fabs(ji.integral(F, 0, x)));
        }
        CHECK(ji.integral(F, 0, 0.0, /*mod=*/0.0) == 0.0);

        // Point law routes through the single-evaluation branch.
        const JumpKernel pt = JumpKernel::compound_poisson(2.0, JumpLaw::point(0.4));
        JumpIntegrator jpt(pt, F.x.h);
        const double want_pt =
            2.0 * (bach(0.4, 0.3) - bach(0.0, 0.3) - 0.4 * oracles::norm_cdf(0.0));
        CHECK(std::fabs(jpt.integral(F, 0, 0.0) - want_pt) < 3e-5);
    }

    TEST_CASE("jump integrator: singular density kernel against a Simpson reference") {
        const auto m = ProcessModel::levy(0.0, 0.09, JumpKernel::none_(), 1.0, "Q", 0.0, true);
        FieldConfig cfg;
        cfg.steps = 128;
        const PropagationField F = compute_G_convolution(m, Payoff::call(0.0), cfg);
        LevyDensity d;
        d.k = [](double y) {
            const double ay = std::fabs(y);
            return ay > 0.0 && ay <= 1.0 ? std::pow(ay, -1.5) : 0.0;
        };
        d.support_radius = 1.0;
        const JumpKernel K = JumpKernel::levy(d); // integrator holds a view of K
        JumpIntegrator ji(K, F.x.h);
        for (double x : {-0.4, 0.0, 0.5})
            CHECK(std::fabs(ji.integral(F, 0, x) - simpson_power_ref(x)) < 2e-4);
    }

    TEST_CASE("atom residual and scan on a field with a fixed-time jump") {
        std::map<double, AtomMeasure> atoms{{0.5, AtomMeasure{0.5, JumpLaw::normal(0.0, 0.2)}}};
        const auto m =
            ProcessModel::grigelionis(0.0, 0.04, JumpKernel::none_(), atoms, 1.0, "Q", 0.0, true);
        FieldConfig cfg;
        cfg.steps = 128;
        const PropagationField F = compute_G_convolution(m, Payoff::call(0.0), cfg);
        for (double x : {-0.3, 0.0, 0.4})
            CHECK(std::fabs(atom_residual(F, m.chars, 0.5, x)) < 1e-8);
        const ResidualScan s = backward_residual_scan(F, m);
        CHECK(!s.jump_skipped);
        CHECK(s.max_abs_u < 1e-4);
        CHECK(s.max_atom < 1e-8);
    }

    TEST_CASE("h-field integrability classification by tail decay") {
        CHECK(h_field_integrable(JumpKernel::none_(), 2));
        CHECK(h_field_integrable(
            JumpKernel::compound_poisson(1.0, JumpLaw::normal(0.0, 1.0)), 2));

        auto tail_kernel = [](double expo) {
            LevyDensity d;
            d.k = [expo](double y) {
                const double ay = std::fabs(y);
                return ay <= 1.0 ? 1.0 : std::pow(ay, -expo);
            };
            return JumpKernel::levy(d);
        };
        // tail k ~ |y|^{-2.5}: integral |y| K converges, integral y^2 K does not
        CHECK(h_field_integrable(tail_kernel(2.5), 1));
        CHECK(!h_field_integrable(tail_kernel(2.5), 2));
        // tail k ~ |y|^{-3.5}: y^2 tail moment exists
        CHECK(h_field_integrable(tail_kernel(3.5), 2));
        // tail k ~ |y|^{-2}: |y| tail moment log-diverges
        CHECK(!h_field_integrable(tail_kernel(2.0), 1));
        // compact support is always integrable
        LevyDensity cd;
        cd.k = [](double y) {
            const double ay = std::fabs(y);
            return ay > 0.0 && ay <= 1.0 ? std::pow(ay, -1.5) : 0.0;
        };
        cd.support_radius = 1.0;
        CHECK(h_field_integrable(JumpKernel::levy(cd), 2));
    }
}
