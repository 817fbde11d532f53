#include <doctest.h>

#include <cmath>
#include <random>

#include "hypres/dynamics.hpp"
#include "hypres/errors.hpp"
#include "hypres/systems.hpp"

using namespace hypres;

namespace {

PhasePoint pt(std::initializer_list<double> q, std::initializer_list<double> p) {
    Vec qv(static_cast<Eigen::Index>(q.size())), pv(static_cast<Eigen::Index>(p.size()));
    int i = 0;
    for (double v : q) qv(i++) = v;
    i = 0;
    for (double v : p) pv(i++) = v;
    return {qv, pv};
}

// decoupled: harmonic oscillator in (x, px) and eta^2 - y^2 in (y, py)
HamiltonianSystem decoupled() {
    return HamiltonianSystem("decoupled", 2, [](const PhasePoint& x) {
        return 0.5 * (x.p(0) * x.p(0) + x.q(0) * x.q(0)) + x.p(1) * x.p(1) - x.q(1) * x.q(1);
    });
}

// a point of moderate size for each built-in
PhasePoint sample_point(const HamiltonianSystem& s) {
    if (s.label() == "hyp2") return pt({1.0, 0.1}, {0.0, -0.1});
    if (s.label() == "semihyp3") return pt({1.0, 0.1, 0.3}, {0.0, -0.1, 0.2});
    if (s.label() == "diabolo2") return pt({0.0, 0.2}, {0.01, 0.1});
    if (s.label() == "model") return pt({0.0, 0.01}, {-0.2, 0.01});
    return pt({0.7}, {0.2});
}

}  // namespace

TEST_CASE("vector field examples") {
    Vec v = hamiltonian_vector_field(harmonic_oscillator(), pt({1.0}, {0.0}));
    CHECK(v(0) == doctest::Approx(0.0));
    CHECK(v(1) == doctest::Approx(-1.0));

    Vec w = hamiltonian_vector_field(inverted_oscillator(), pt({1.0}, {2.0}));
    CHECK(w(0) == doctest::Approx(4.0));
    CHECK(w(1) == doctest::Approx(2.0));

    Vec z = hamiltonian_vector_field(diabolo2(), pt({0.0, 0.0}, {0.0, 0.0}));
    CHECK(z.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-finite gradient raises a domain error") {
    HamiltonianSystem bad("bad", 1, [](const PhasePoint& x) { return x.q(0); },
                          [](const PhasePoint&) { return Vec::Constant(2, NAN); });
    CHECK_THROWS_AS(hamiltonian_vector_field(bad, pt({0.0}, {0.0})), DomainError);
}

TEST_CASE("flow of linear systems matches closed forms") {
    PhasePoint a = flow(harmonic_oscillator(), pt({1.0}, {0.0}), 2.0 * M_PI, 1e-12);
    CHECK(std::abs(a.q(0) - 1.0) < 1e-8);
    CHECK(std::abs(a.p(0)) < 1e-8);

    // qdot = 2p, pdot = 2q from (0, 1): q = sinh 2t, p = cosh 2t
    PhasePoint b = flow(inverted_oscillator(), pt({0.0}, {1.0}), 1.0, 1e-12);
    CHECK(b.q(0) == doctest::Approx(std::sinh(2.0)).epsilon(1e-9));
    CHECK(b.p(0) == doctest::Approx(std::cosh(2.0)).epsilon(1e-9));

    const PhasePoint x0 = pt({0.3, -0.2}, {0.1, 0.4});
    PhasePoint c = flow(hyp2(), x0, 0.0, 1e-10);
    CHECK(c.stacked() == x0.stacked());
}

TEST_CASE("variational jacobian matches matrix exponentials") {
    VariationalState h = flow_with_variations(harmonic_oscillator(), pt({1.0}, {0.0}),
                                              2.0 * M_PI, 1e-12);
    CHECK((h.jacobian - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-7);

    VariationalState iv = flow_with_variations(inverted_oscillator(), pt({0.2}, {0.1}), 1.0, 1e-12);
    Mat expected(2, 2);
    expected << std::cosh(2.0), std::sinh(2.0), std::sinh(2.0), std::cosh(2.0);
    CHECK((iv.jacobian - expected).cwiseAbs().maxCoeff() < 1e-8);

    // block decoupling: stacked order (x, y, px, py)
    const double t = 0.8;
    VariationalState d = flow_with_variations(decoupled(), pt({0.5, 0.1}, {0.0, 0.2}), t, 1e-12);
    Mat ref = Mat::Zero(4, 4);
    ref(0, 0) = std::cos(t); ref(0, 2) = std::sin(t);
    ref(2, 0) = -std::sin(t); ref(2, 2) = std::cos(t);
    ref(1, 1) = std::cosh(2 * t); ref(1, 3) = std::sinh(2 * t);
    ref(3, 1) = std::sinh(2 * t); ref(3, 3) = std::cosh(2 * t);
    CHECK((d.jacobian - ref).cwiseAbs().maxCoeff() < 1e-6);  // finite-difference Hessian
}

TEST_CASE("energy conservation and symplecticity on built-ins") {
    const double tol = 1e-10;
    for (const auto& label : builtin_labels()) {
        CAPTURE(label);
        const HamiltonianSystem s = builtin_system(label);
        const PhasePoint x0 = sample_point(s);
        for (double t : {-3.0, 2.5}) {
            VariationalState v = flow_with_variations(s, x0, t, tol);
            CHECK(std::abs(s.h0(v.point) - s.h0(x0)) <= 100.0 * tol * std::abs(t));
            CHECK(symplectic_defect(v.jacobian) <= 1000.0 * tol * std::max(1.0, v.jacobian.norm()));
        }
    }
    // long horizon on a bounded system
    const HamiltonianSystem ho = harmonic_oscillator();
    const PhasePoint x0 = pt({0.7}, {0.2});
    PhasePoint x = flow(ho, x0, 50.0, tol);
    CHECK(std::abs(ho.h0(x) - ho.h0(x0)) <= 100.0 * tol * 50.0);
}

TEST_CASE("group law") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double tol = 1e-11;
    for (const auto& label : {"harmonic", "semihyp3"}) {
        const HamiltonianSystem s = builtin_system(label);
        // stay bounded: semihyp3 started on the elliptic part
        const PhasePoint x0 = s.dof() == 1 ? pt({0.7}, {0.2}) : pt({0.8, 0.0, 0.3}, {0.1, 0.0, 0.0});
        for (int i = 0; i < 5; ++i) {
            const double a = u(rng), b = u(rng);
            const Vec lhs = flow(s, x0, a + b, tol).stacked();
            const Vec rhs = flow(s, flow(s, x0, b, tol), a, tol).stacked();
            CHECK((lhs - rhs).norm() <= 10.0 * std::max(1.0, lhs.norm()) * tol * 100.0);
        }
    }
}

TEST_CASE("finite-time blow-up reports the last good time") {
    // qdot = p, pdot = 4 q^3 escapes to infinity in finite time
    HamiltonianSystem quartic("quartic", 1, [](const PhasePoint& x) {
        return 0.5 * x.p(0) * x.p(0) - std::pow(x.q(0), 4);
    });
    try {
        flow(quartic, pt({1.0}, {1.5}), 10.0, 1e-10);
        FAIL("expected an integration error");
    } catch (const IntegrationError& e) {
        CHECK(e.last_good_time() > 0.0);
        CHECK(e.last_good_time() < 10.0);
    } catch (const DomainError&) {
        // overflow to non-finite values is an acceptable report as well
    }
}

TEST_CASE("gradient consistency for built-ins and finite-difference fallback") {
    for (const auto& label : builtin_labels()) {
        CAPTURE(label);
        const HamiltonianSystem s = builtin_system(label);
        const Vec lo = Vec::Constant(s.dim(), -1.0), hi = Vec::Constant(s.dim(), 1.0);
        CHECK(gradient_consistency_error(s, lo, hi, 100) <= 1e-6);
        for (int i = 0; i < 3; ++i) {
            const Mat h = s.hess_h0(sample_point(s));
            CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
    const HamiltonianSystem d = decoupled();
    const Vec g = d.grad_h0(pt({0.5, 0.25}, {-1.0, 2.0}));
    CHECK(g(0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(g(1) == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(g(2) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(g(3) == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("escape function examples") {
    // free motion eta^2 with G = y eta: {H, G} = 2 eta^2
    HamiltonianSystem free("free", 1, [](const PhasePoint& x) { return x.p(0) * x.p(0); });
    ScalarField g = [](const PhasePoint& x) { return x.q(0) * x.p(0); };
    SamplingRegion shell{Vec::Constant(2, -2.0), Vec::Constant(2, 2.0), [](const PhasePoint& x) {
                             return std::abs(x.p(0) * x.p(0) - 1.0) <= 0.5;
                         }};
    EscapeReport r1 = check_escape_function(free, g, shell, 400, 1.0);
    CHECK(r1.pass);
    CHECK(r1.min_bracket >= 1.0);

    SamplingRegion annulus{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), [](const PhasePoint& x) {
                               const double r2 = x.q(0) * x.q(0) + x.p(0) * x.p(0);
                               return r2 >= 0.25 && r2 <= 1.0;
                           }};
    EscapeReport r2 = check_escape_function(inverted_oscillator(), g, annulus, 400, 0.5);
    CHECK(r2.pass);
    CHECK(r2.min_bracket >= 0.5);
    CHECK(r2.min_bracket < 0.6);  // 2(y^2 + eta^2) gets close to 1/2 on the inner circle

    const HamiltonianSystem ho = harmonic_oscillator();
    ScalarField self = [&](const PhasePoint& x) { return ho.h0(x); };
    EscapeReport r3 = check_escape_function(ho, self, annulus, 100, 1e-3);
    CHECK_FALSE(r3.pass);
    CHECK(std::abs(r3.min_bracket) < 1e-8);

    SamplingRegion empty{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0),
                         [](const PhasePoint&) { return false; }};
    CHECK_THROWS_AS(check_escape_function(ho, self, empty, 5, 0.0), EmptyRegionError);
}
