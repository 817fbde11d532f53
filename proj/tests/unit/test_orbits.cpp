#include <doctest.h>

#include <cmath>

#include "hypres/errors.hpp"
#include "hypres/orbits.hpp"
#include "hypres/systems.hpp"

using namespace hypres;

namespace {

PhasePoint stacked(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double a : v) x(i++) = a;
    return PhasePoint::from_stacked(x);
}

// hyp2 orbit of energy E in the (x, px) plane, started at x = sqrt(2E)
PeriodicOrbit hyp2_orbit(double e) {
    return find_periodic_orbit(hyp2(), stacked({std::sqrt(2 * e), 0.0, 0.0, 0.0}), 2 * M_PI,
                               1e-11, 40);
}

}  // namespace

TEST_CASE("hyp2 orbit from the textbook guess") {
    const HamiltonianSystem s = hyp2();
    PeriodicOrbit o = find_periodic_orbit(s, stacked({1.1, 0.05, 0.0, 0.0}), 6.3, 1e-10, 40);
    CHECK(std::abs(o.period - 2 * M_PI) < 1e-8);
    CHECK(o.residual <= 1e-10);
    CHECK(o.samples.size() >= 65);
    for (const auto& smp : o.samples) {
        CHECK(std::abs(smp.point.q(1)) < 1e-8);
        CHECK(std::abs(smp.point.p(1)) < 1e-8);
        CHECK(std::abs(s.h0(smp.point) - o.energy) <= 100 * 1e-10);
    }
    // shooting fixed point, checked independently
    const PhasePoint back = flow(s, o.x0, o.period, 1e-12);
    CHECK((back.stacked() - o.x0.stacked()).norm() <= 1e-9);
}

TEST_CASE("semihyp3 orbit has the same period") {
    PeriodicOrbit o =
        find_periodic_orbit(semihyp3(), stacked({1.1, 0.05, 0.0, 0.0, 0.0, 0.0}), 6.3, 1e-10, 40);
    CHECK(std::abs(o.period - 2 * M_PI) < 1e-8);
    for (const auto& smp : o.samples) CHECK(std::abs(smp.point.q(2)) < 1e-8);
}

TEST_CASE("model orbit sits on the invariant line") {
    // (t, x, tau, xi)
    PeriodicOrbit o = find_periodic_orbit(model_system(1.0), stacked({0.0, 0.01, -0.3, 0.01}),
                                          2 * M_PI, 1e-10, 40);
    CHECK(std::abs(o.period - 2 * M_PI) < 1e-8);
    CHECK(o.x0.p(0) == doctest::Approx(-0.3).epsilon(1e-6));
    CHECK(std::abs(o.x0.q(1)) < 1e-8);
    CHECK(std::abs(o.x0.p(1)) < 1e-8);
}

TEST_CASE("shooting errors") {
    // the origin of the harmonic oscillator is an equilibrium
    CHECK_THROWS_AS(find_periodic_orbit(harmonic_oscillator(), stacked({0.0, 0.0}), 6.3, 1e-10, 40),
                    FixedPointError);
    // hopeless guess with a single iteration
    CHECK_THROWS_AS(find_periodic_orbit(hyp2(), stacked({1.1, 0.4, 0.0, 0.3}), 4.0, 1e-12, 1),
                    NoConvergence);
}

TEST_CASE("hyp2 family: periods and actions") {
    const HamiltonianSystem s = hyp2();
    PeriodicOrbit seed = find_periodic_orbit(s, stacked({1.1, 0.05, 0.0, 0.0}), 6.3, 1e-11, 40);
    OrbitFamily fam = continue_family(s, seed, 0.3, 0.7, 5);
    REQUIRE_FALSE(fam.failure);
    REQUIRE(fam.orbits.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(fam.periods(i) - 2 * M_PI) < 1e-7);
        CHECK(std::abs(fam.actions(i) - 2 * M_PI * fam.energies(i)) < 1e-7);
        if (i > 0) CHECK(fam.energies(i) > fam.energies(i - 1));
    }
    CHECK(action_derivative_check(fam).max_rel_err <= 1e-5);
}

TEST_CASE("model family: tau = -E, slope matches the period") {
    const HamiltonianSystem s = model_system(1.0);
    PeriodicOrbit seed = find_periodic_orbit(s, stacked({0.0, 0.01, 0.0, 0.01}), 2 * M_PI, 1e-11, 40);
    OrbitFamily fam = continue_family(s, seed, -0.1, 0.1, 5);
    REQUIRE_FALSE(fam.failure);
    for (std::size_t i = 0; i < fam.orbits.size(); ++i) {
        CHECK(fam.orbits[i].x0.p(0) == doctest::Approx(-fam.energies(i)).epsilon(1e-8));
        CHECK(std::abs(fam.periods(i) - 2 * M_PI) < 1e-8);
    }
    CHECK(action_derivative_check(fam).max_rel_err <= 1e-5);
}

TEST_CASE("degenerate continuation repeats the seed") {
    const HamiltonianSystem s = hyp2();
    PeriodicOrbit seed = hyp2_orbit(0.5);
    OrbitFamily fam = continue_family(s, seed, seed.energy, seed.energy, 3);
    REQUIRE(fam.orbits.size() == 3);
    for (const auto& o : fam.orbits) {
        CHECK(o.energy == doctest::Approx(seed.energy).epsilon(1e-12));
        CHECK(o.period == doctest::Approx(seed.period).epsilon(1e-10));
    }
}

TEST_CASE("action quadrature") {
    CHECK(action_S0(hyp2_orbit(0.5)) == doctest::Approx(M_PI).epsilon(1e-7));
    CHECK(action_S0(hyp2_orbit(1.0)) == doctest::Approx(2 * M_PI).epsilon(1e-7));

    PeriodicOrbit point;
    point.period = 1.0;
    for (int i = 0; i <= 64; ++i) point.samples.push_back({i / 64.0, stacked({0.2, 0.3})});
    CHECK(action_S0(point) == 0.0);
}

TEST_CASE("phase-condition independence") {
    const HamiltonianSystem s = hyp2();
    PeriodicOrbit a = hyp2_orbit(0.5);
    // restart from a quarter period later, slightly perturbed
    Vec x1 = a.samples[a.samples.size() / 4].point.stacked();
    x1(1) += 0.02;
    x1(0) += 0.01;
    PeriodicOrbit b = find_periodic_orbit(s, PhasePoint::from_stacked(x1), 6.0, 1e-11, 40);
    const double e_shift = b.energy - a.energy;
    CHECK(std::abs(b.period - a.period) < 1e-9);
    // actions compared after removing the energy drift of the restart
    CHECK(std::abs(action_S0(b) - action_S0(a) - 2 * M_PI * e_shift) < 1e-8);
}

TEST_CASE("action derivative needs three orbits") {
    OrbitFamily fam;
    fam.energies = Vec::LinSpaced(2, 0.0, 1.0);
    fam.periods = fam.energies;
    fam.actions = fam.energies;
    CHECK_THROWS_AS(action_derivative_check(fam), ArityError);
}

TEST_CASE("subprincipal integral") {
    PeriodicOrbit o = hyp2_orbit(0.5);
    HamiltonianSystem s = hyp2();
    CHECK_THROWS_AS(subprincipal_integral(o, s), ConfigError);

    s.set_h1([](const PhasePoint&) { return 0.0; });
    CHECK(subprincipal_integral(o, s) == 0.0);
    s.set_h1([](const PhasePoint&) { return 1.0; });
    CHECK(subprincipal_integral(o, s) == doctest::Approx(-2 * M_PI).epsilon(1e-9));
    s.set_h1([](const PhasePoint& x) { return x.q(0) * x.q(0); });
    // amplitude sqrt(2E) = 1
    CHECK(subprincipal_integral(o, s) == doctest::Approx(-M_PI * 2 * o.energy).epsilon(1e-6));
}
