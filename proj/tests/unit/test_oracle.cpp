#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hypres/errors.hpp"
#include "hypres/model_quantum.hpp"
#include "hypres/oracle.hpp"

using namespace hypres;

namespace {

// the k-th element of the string -i h (2k+1) nearest to each computed value
double string_error(const std::vector<cplx>& ev, double h, int kmax) {
    double worst = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        const cplx target(0.0, -h * (2 * k + 1));
        double best = INFINITY;
        for (const cplx& e : ev) best = std::min(best, std::abs(e - target));
        worst = std::max(worst, best);
    }
    return worst;
}

// nearest-neighbour distance from every b point to a
double max_nearest(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (const cplx& y : b) {
        double best = INFINITY;
        for (const cplx& x : a) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_CASE("grid validation") {
    GridSpec1D g{4.0, 1024, M_PI / 4, 0.05};
    CHECK_NOTHROW(g.validate());
    CHECK(g.spacing() == doctest::Approx(8.0 / 1025));
}

TEST_CASE("grid validation rejects bad input") {
    CHECK_THROWS_AS((GridSpec1D{4.0, 64, M_PI / 4, 0.05}.validate()), ContractError);
    CHECK_THROWS_AS((GridSpec1D{400.0, 256, M_PI / 4, 0.05}.validate()), ContractError);
    CHECK_THROWS_AS((GridSpec1D{4.0, 256, 2.0, 0.05}.validate()), ContractError);
}

TEST_CASE("rotation by pi/4 turns the inverted oscillator into -i times the harmonic one") {
    GridSpec1D g{4.0, 256, M_PI / 4, 0.05};
    const CMat a = scaled_inverted_oscillator(g, Discretization::FiniteDifference2);
    const Mat d2 = second_derivative(g, Discretization::FiniteDifference2);
    CMat ho = (-g.h * g.h * d2).cast<cplx>();
    for (int j = 0; j < g.n; ++j) ho(j, j) += g.y(j) * g.y(j);
    CHECK((a - cplx(0, -1) * ho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inverted oscillator string") {
    GridSpec1D wide{12.0, 1024, M_PI / 4, 0.05};
    const auto ev = all_eigenvalues(scaled_inverted_oscillator(wide)).eigenvalues;
    CHECK(string_error(ev, 0.05, 5) <= 1e-4 * 0.05);
    for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i - 1].real() <= ev[i].real());

    // second-order differences on the same grid: error about (k dx)^2 / 12
    const auto fd = all_eigenvalues(scaled_inverted_oscillator(wide, Discretization::FiniteDifference2));
    CHECK(string_error(fd.eigenvalues, 0.05, 5) <= 0.1 * 0.05);

    GridSpec1D narrow{4.0, 256, M_PI / 4, 0.05};
    const auto es = all_eigenvalues(scaled_inverted_oscillator(narrow));
    CHECK(string_error(es.eigenvalues, 0.05, 5) <= 1e-3 * 0.05);
}

TEST_CASE("theta = 0 is self-adjoint") {
    GridSpec1D g{4.0, 256, 0.0, 0.05};
    const auto res = eigenvalues_in_window(scaled_inverted_oscillator(g), SpectralWindow{0.0, 1.0, 0.5, 1.0});
    for (const cplx& e : res.eigenvalues) CHECK(e.imag() >= -1e-10);
}

TEST_CASE("window eigenvalues are stable in theta") {
    const double h = 0.05;
    SpectralWindow w{0.0, 0.2, 0.3, 1.0};
    auto in = [&](double th) {
        GridSpec1D g{4.0, 384, th, h};
        return eigenvalues_in_window(scaled_inverted_oscillator(g), w).eigenvalues;
    };
    const auto a = in(M_PI / 4), b = in(M_PI / 6);
    REQUIRE(a.size() >= 3);
    // compare the k <= 2 string only; the rotated continuum moves with theta
    std::vector<cplx> low;
    for (const cplx& e : a)
        if (e.imag() > -h * 5.5 && std::abs(e.real()) < 1e-6) low.push_back(e);
    CHECK(low.size() == 3);
    CHECK(max_nearest(b, low) <= 1e-6 * h);
}

TEST_CASE("grid convergence is second order for finite differences") {
    const double h = 0.1;
    auto lowest = [&](int n) {
        GridSpec1D g{4.0, n, M_PI / 4, h};
        auto ev = all_eigenvalues(scaled_inverted_oscillator(g, Discretization::FiniteDifference2)).eigenvalues;
        return *std::min_element(ev.begin(), ev.end(), [&](cplx x, cplx y) {
            return std::abs(x - cplx(0, -h)) < std::abs(y - cplx(0, -h));
        });
    };
    const cplx a = lowest(199), b = lowest(399), c = lowest(799);
    const double d1 = std::abs(b - a), d2 = std::abs(c - b);
    CHECK(d2 <= d1 / 3.0);  // ideal ratio 4
}

TEST_CASE("scaled model operator is a sum of one-dimensional spectra") {
    const double h = 0.02, mu = 1.0;
    GridSpec1D g{1.25, 160, M_PI / 4, h};
    const auto one = all_eigenvalues(scaled_model_operator(mu, g, 0)).eigenvalues;
    const auto ref = all_eigenvalues(CMat((mu / 2.0) * scaled_inverted_oscillator(g))).eigenvalues;
    CHECK(max_nearest(ref, one) < 1e-12);
    // lowest string -i mu h (k + 1/2)
    std::vector<cplx> string;
    for (int k = 0; k <= 4; ++k) string.emplace_back(0.0, -mu * h * (k + 0.5));
    CHECK(max_nearest(one, string) <= 1e-3 * h);

    const auto three = all_eigenvalues(scaled_model_operator(mu, g, 1)).eigenvalues;
    CHECK(three.size() == 3 * one.size());
    std::vector<cplx> shifted;
    for (int m = -1; m <= 1; ++m)
        for (const cplx& s : string) shifted.push_back(s + m * h);
    CHECK(max_nearest(three, shifted) <= 1e-3 * h);
}

TEST_CASE("eigenvalues_in_window on diagonal input") {
    CMat d = CMat::Zero(4, 4);
    d(0, 0) = cplx(0.1, -0.01);
    d(1, 1) = cplx(0.5, -0.01);
    d(2, 2) = cplx(-0.05, -0.02);
    d(3, 3) = cplx(0.0, 0.3);
    const auto r = eigenvalues_in_window(d, SpectralWindow{0.0, 0.2, 0.05, 1.0});
    REQUIRE(r.eigenvalues.size() == 2);
    CHECK(std::abs(r.eigenvalues[0] - cplx(-0.05, -0.02)) < 1e-15);
    CHECK(std::abs(r.eigenvalues[1] - cplx(0.1, -0.01)) < 1e-15);
    CHECK(eigenvalues_in_window(d, SpectralWindow{5.0, 0.1, 0.05, 1.0}).eigenvalues.empty());
}

TEST_CASE("separable reference") {
    ResonanceLattice r = separable_reference(0.1, std::sqrt(2.0), 2, 3, 2);
    const cplx z0(0.05 + 0.05 * std::sqrt(2.0), -0.05);
    CHECK(std::any_of(r.entries.begin(), r.entries.end(),
                      [&](const LatticeEntry& e) { return std::abs(e.z - z0) < 1e-15; }));
    CHECK(r.entries.size() == 3 * 4 * 3);

    ResonanceLattice flat = separable_reference(0.1, std::sqrt(2.0), 0, 3, 2);
    for (const auto& e : flat.entries) CHECK(e.z.imag() == doctest::Approx(-0.05));

    // omega = 1: h(n + l + 1) collides; count multiplicities by brute force
    ResonanceLattice deg = separable_reference(0.1, 1.0, 0, 4, 2);
    int total = 0;
    for (const auto& e : deg.entries) {
        total += e.multiplicity;
        const int s = static_cast<int>(std::lround(e.z.real() / 0.1 - 1.0));
        int expect = 0;
        for (int n = 0; n <= 4; ++n)
            for (int l = 0; l <= 2; ++l) expect += (n + l == s);
        CHECK(e.multiplicity == expect);
    }
    CHECK(total == 5 * 3);
}

TEST_CASE("calibration on the model") {
    const double h = 0.01;
    const ModelSpec spec = ModelSpec::hyperbolic(1.0, h);
    const SpectralWindow w{0.0, 0.05, 0.05, 1.0};
    const SemiclassicalAction action = model_action(spec);
    const ResonanceLattice ref = model_resonances(spec, w);

    const CalibrationReport rep = calibrate_conventions(action, w, ref, 1e-2 * h);
    CHECK(rep.conventions == Conventions{1, 0, 0});
    CHECK(rep.max_err <= 1e-12);

    const CalibrationReport direct = calibrate_conventions(solve_bs(action, w), ref, 1e-2 * h);
    CHECK(direct.max_err <= 1e-12);
    CHECK(direct.matched == static_cast<int>(ref.entries.size()));

    ResonanceLattice other = model_resonances(ModelSpec::hyperbolic(1.0, 2 * h), w);
    CHECK_THROWS_AS(calibrate_conventions(action, w, other, 1e-2 * h), CalibrationFailure);
    CHECK_THROWS_AS(calibrate_conventions(solve_bs(action, w), other, 1e-2 * h), CalibrationFailure);
}
