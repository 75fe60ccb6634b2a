#include <cmath>
#include <complex>

#include "doctest.h"

#include "semicomp/characteristics.hpp"
#include "semicomp/errors.hpp"

using namespace semicomp;

namespace {

JumpKernel power_kernel(double c, double alpha, double radius) {
    LevyDensity d;
    d.k = [c, alpha, radius](double y) {
        const double ay = std::fabs(y);
        return ay <= radius ? c * std::pow(ay, -1.0 - alpha) : 0.0;
    };
    d.support_radius = radius;
    return JumpKernel::levy(d);
}

} // namespace

TEST_SUITE("characteristics") {

    TEST_CASE("jump law moments: closed forms") {
        const JumpLaw n = JumpLaw::normal(0.3, 0.5);
        CHECK(n.mean() == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(n.second_moment() == doctest::Approx(0.34).epsilon(1e-14));
        CHECK(n.fourth_moment() == doctest::Approx(0.3306).epsilon(1e-13));
        CHECK(n.abs_moment() == doctest::Approx(0.46867273224175554).epsilon(1e-12));

        const JumpLaw u = JumpLaw::uniform(-1.0, 3.0);
        CHECK(u.mean() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(u.second_moment() == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
        CHECK(u.fourth_moment() == doctest::Approx(244.0 / 20.0).epsilon(1e-13));
        const auto cf = u.cf(0.7);
        CHECK(cf.real() == doctest::Approx(0.5383668049594875).epsilon(1e-13));
        CHECK(cf.imag() == doctest::Approx(0.45346010424440913).epsilon(1e-13));

        const JumpLaw p = JumpLaw::point(0.7);
        CHECK(p.mean() == doctest::Approx(0.7));
        CHECK(p.second_moment() == doctest::Approx(0.49));
        CHECK(p.abs_moment() == doctest::Approx(0.7));
        CHECK(!p.continuous());
    }

    TEST_CASE("jump law quantiles invert the cdf") {
        const JumpLaw u = JumpLaw::uniform(-1.0, 3.0);
        CHECK(u.quantile(0.25) == doctest::Approx(0.0).epsilon(1e-14));
        const JumpLaw n = JumpLaw::normal(1.0, 2.0);
        CHECK(n.quantile(0.5) == doctest::Approx(1.0).epsilon(1e-12));
        // 97.5% quantile of N(1, 4): 1 + 2 * 1.959963984540054
        CHECK(n.quantile(0.975) == doctest::Approx(1.0 + 2.0 * 1.959963984540054).epsilon(1e-12));
    }

    TEST_CASE("integrator merge is the atom union; horizons must agree") {
        IntegratorSpec a;
        a.horizon = 1.0;
        a.atoms = {0.25, 0.5};
        IntegratorSpec b;
        b.horizon = 1.0;
        b.atoms = {0.5, 0.75};
        const IntegratorSpec m = merge_integrators(a, b);
        REQUIRE(m.atoms.size() == 3);
        CHECK(m.atoms[0] == doctest::Approx(0.25));
        CHECK(m.atoms[1] == doctest::Approx(0.5));
        CHECK(m.atoms[2] == doctest::Approx(0.75));
        CHECK(m.value(1.0) == doctest::Approx(1.0 + 3.0));  // t + one unit per atom

        IntegratorSpec c;
        c.horizon = 2.0;
        CHECK_THROWS_AS(merge_integrators(a, c), ConfigError);
    }

    TEST_CASE("compound poisson kernel moments") {
        const JumpKernel k = JumpKernel::compound_poisson(2.0, JumpLaw::normal(0.1, 0.2));
        CHECK(k.lebesgue_moment(0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(k.lebesgue_moment(1) == doctest::Approx(0.2).epsilon(1e-10));
        CHECK(k.lebesgue_moment(2) == doctest::Approx(2.0 * (0.01 + 0.04)).epsilon(1e-10));
        // restricted second moment over |y| <= 0.15 (mpmath oracle)
        CHECK(k.lebesgue_moment(2, 0.0, 0.15) ==
              doctest::Approx(0.006985861813541488).epsilon(1e-9));
        CHECK(!k.infinite_activity());
        CHECK(k.mass_finite());
        CHECK(k.small_abs_moment_finite());
        CHECK(k.tail_abs_moment_finite());
        CHECK(k.fourth_moment_finite());
    }

    TEST_CASE("power levy density: moments and activity classification") {
        const JumpKernel k = power_kernel(1.0, 0.5, 1.0);  // k(y) = |y|^{-3/2} on |y| <= 1
        CHECK(k.infinite_activity());
        CHECK_THROWS_AS((void)k.lebesgue_moment(0), IntegrabilityError);
        CHECK_THROWS_AS((void)k.lebesgue_abs_moment(0), IntegrabilityError);
        // Signed first moment of a symmetric kernel cancels; the absolute
        // moment is 2 * integral_0^1 y^{1-3/2} dy = 4.
        CHECK(k.lebesgue_moment(1) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(k.lebesgue_abs_moment(1) == doctest::Approx(4.0).epsilon(1e-8));
        // restricted band: 2 * integral_{1/4}^1 y^{-1/2} dy = 2
        CHECK(k.lebesgue_abs_moment(1, 0.25) == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(k.lebesgue_moment(2) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
        CHECK(k.lebesgue_moment(4) == doctest::Approx(4.0 / 7.0).epsilon(1e-9));
        CHECK(k.small_abs_moment_finite());
        CHECK(k.tail_abs_moment_finite());  // compact support

        const JumpKernel k2 = power_kernel(1.0, 1.5, 1.0);
        CHECK_THROWS_AS((void)k2.lebesgue_abs_moment(1), IntegrabilityError);
        CHECK(!k2.small_abs_moment_finite());
        CHECK(k2.fourth_moment_finite());
    }

    TEST_CASE("lebesgue_integral applies only to the lebesgue part") {
        JumpKernel k = JumpKernel::compound_poisson(1.5, JumpLaw::uniform(0.0, 2.0));
        k.atoms.emplace(0.5, AtomMeasure{0.5, JumpLaw::point(10.0)});
        // E y^2 of uniform(0,2) = 4/3; atom must not contribute
        CHECK(k.lebesgue_integral([](double y) { return y * y; }) ==
              doctest::Approx(1.5 * 4.0 / 3.0).epsilon(1e-10));
        CHECK(k.variant() == JumpKernel::Variant::mixed);
    }

    TEST_CASE("rebase onto a merged integrator keeps foreign atoms empty") {
        ProcessModel x = ProcessModel::grigelionis(
            0.0, 0.04, JumpKernel::none_(),
            {{0.5, AtomMeasure{0.5, JumpLaw::normal(0.0, 0.1)}}}, 1.0, "Q", 0.0, true);
        IntegratorSpec other;
        other.horizon = 1.0;
        other.atoms = {0.25, 0.5};
        const IntegratorSpec merged = merge_integrators(x.chars.integrator, other);
        const DiffChar re = rebase_characteristics(x.chars, merged);
        CHECK(re.integrator.atoms.size() == 2);
        CHECK(re.kernel.atoms.count(0.5) == 1);
        CHECK(re.kernel.atoms.count(0.25) == 0);  // zero-mass foreign atom: simply absent
        CHECK(re.atom_drift_at(0.25) == doctest::Approx(0.0));

        // rebasing onto a non-superset target throws
        IntegratorSpec bad;
        bad.horizon = 1.0;
        bad.atoms = {0.75};
        CHECK_THROWS_AS(rebase_characteristics(x.chars, bad), ConfigError);
    }

    TEST_CASE("model validation rejects inconsistent inputs") {
        // atom time outside (0, T]
        IntegratorSpec spec;
        spec.horizon = 1.0;
        spec.atoms = {1.5};
        CHECK_THROWS_AS(spec.validate(), ConfigError);

        // negative atom mass
        CHECK_THROWS_AS(ProcessModel::grigelionis(
                            0.0, 0.04, JumpKernel::none_(),
                            {{0.5, AtomMeasure{-0.1, JumpLaw::point(1.0)}}}, 1.0)
                            .validate(),
                        ConfigError);

        // negative diffusion
        CHECK_THROWS_AS(ProcessModel::levy(0.0, -1.0, JumpKernel::none_(), 1.0).validate(),
                        ConfigError);
    }

    TEST_CASE("triplet view is defined exactly for PII models") {
        const ProcessModel m = ProcessModel::levy(
            0.125, 0.5, JumpKernel::compound_poisson(1.0, JumpLaw::point(1.0)), 2.0);
        const LevyTriplet tr = triplet_of(m);
        CHECK(tr.b == doctest::Approx(0.125));
        CHECK(tr.c == doctest::Approx(0.5));
        CHECK(tr.kernel.intensity == doctest::Approx(1.0));

        const ProcessModel it = ProcessModel::ito(
            [](double, double x) { return -x; }, [](double, double) { return 1.0; },
            JumpKernel::none_(), nullptr, 1.0);
        CHECK(!it.pii());
        CHECK_THROWS_AS((void)triplet_of(it), ConfigError);
    }

    TEST_CASE("atom drift accessor") {
        ProcessModel m = ProcessModel::grigelionis(
            0.0, 0.01, JumpKernel::none_(),
            {{0.5, AtomMeasure{1.0, JumpLaw::point(0.0)}}}, 1.0);
        m.chars.atom_drift[0.5] = -0.25;
        CHECK(m.chars.atom_drift_at(0.5) == doctest::Approx(-0.25));
        CHECK(m.chars.atom_drift_at(0.7) == doctest::Approx(0.0));
    }
}
