#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "hypres/bs.hpp"
#include "hypres/errors.hpp"
#include "hypres/model_quantum.hpp"
#include "hypres/systems.hpp"

using namespace hypres;

namespace {

PhasePoint stacked(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double a : v) x(i++) = a;
    return PhasePoint::from_stacked(x);
}

struct Built {
    OrbitFamily family;
    std::vector<FloquetData> floquet;
};

Built hyp2_family() {
    const HamiltonianSystem s = hyp2();
    PeriodicOrbit seed = find_periodic_orbit(s, stacked({1.0, 0.0, 0.0, 0.0}), 6.3, 1e-11, 40);
    Built b;
    b.family = continue_family(s, seed, 0.3, 0.7, 9);
    for (const auto& o : b.family.orbits) b.floquet.push_back(floquet_analysis(s, o));
    return b;
}

// the set {h m - i h (k + 1/2)} inside the window, by enumeration
std::set<std::pair<long, long>> model_points(double h, const SpectralWindow& w) {
    std::set<std::pair<long, long>> out;
    for (int m = -1000; m <= 1000; ++m)
        for (int k = 0; k <= w.k_bound(h); ++k) {
            const cplx z(h * m, -h * (k + 0.5));
            if (w.contains(z, 1e-12)) out.insert({std::lround(z.real() / h * 2), std::lround(z.imag() / h * 2)});
        }
    return out;
}

}  // namespace

TEST_CASE("window helpers") {
    SpectralWindow w{0.0, 0.05, 0.05, 1.0};
    CHECK(w.contains(cplx(0.05, -0.05)));
    CHECK_FALSE(w.contains(cplx(0.051, -0.01)));
    CHECK_FALSE(w.contains(cplx(0.0, 0.001)));
    CHECK(w.k_bound(0.01) == 4);  // log(100) = 4.6
    SpectralWindow s = SpectralWindow::standard(0.5, 0.1, 0.01);
    CHECK(s.depth == doctest::Approx(0.01 * std::log(100.0)));
    CHECK_THROWS_AS((SpectralWindow{0.0, -1.0, 0.1, 1.0}.validate()), ContractError);
}

TEST_CASE("model action has s1 = -i pi") {
    SemiclassicalAction a = model_action(ModelSpec::hyperbolic(1.0, 0.01));
    for (double e : {-0.3, 0.0, 0.4}) {
        CHECK(std::abs(a.s1(e) - cplx(0, -M_PI)) < 1e-12);
        CHECK(std::abs(a.ds0(e)) == doctest::Approx(2 * M_PI));
    }
}

TEST_CASE("model lattice equals the closed form") {
    const double h = 0.01;
    SemiclassicalAction a = model_action(ModelSpec::hyperbolic(1.0, h));
    SpectralWindow w{0.0, 0.05, 0.05, 1.0};
    ResonanceLattice lat = solve_bs(a, w);
    CHECK(lat.entries.size() == 55);
    const auto expected = model_points(h, w);
    std::set<std::pair<long, long>> got;
    std::set<std::pair<int, int>> labels;
    for (const auto& e : lat.entries) {
        const double re = e.z.real() / h, im = e.z.imag() / h;
        CHECK(std::abs(re - std::round(re)) < 1e-10);
        CHECK(std::abs(im + e.k[0] + 0.5) < 1e-10);
        CHECK(e.newton_residual <= 1e-12 * 2 * M_PI * h);
        CHECK(w.contains(e.z, 1e-14));
        got.insert({std::lround(re * 2), std::lround(im * 2)});
        labels.insert({e.m, e.k[0]});
    }
    CHECK(got == expected);
    CHECK(labels.size() == lat.entries.size());

    // and the quantum model's own lattice
    ResonanceLattice q = model_resonances(ModelSpec::hyperbolic(1.0, h), w);
    LatticeDiff d = lattice_diff(lat, q, 1e-6 * h);
    CHECK(d.matched == 55);
    CHECK(d.max_err <= 1e-12 * h);
}

TEST_CASE("c_const = 0 keeps only k = 0") {
    SemiclassicalAction a = model_action(ModelSpec::hyperbolic(1.0, 0.01));
    ResonanceLattice lat = solve_bs(a, SpectralWindow{0.0, 0.05, 0.05, 0.0});
    REQUIRE_FALSE(lat.entries.empty());
    for (const auto& e : lat.entries) CHECK(e.k[0] == 0);
}

TEST_CASE("window outside the family range is rejected") {
    SemiclassicalAction a = model_action(ModelSpec::hyperbolic(1.0, 0.01), -0.1, 0.1);
    CHECK_THROWS_AS(solve_bs(a, SpectralWindow{5.0, 0.05, 0.05, 1.0}), ContractError);
}

TEST_CASE("lattice_diff basics") {
    ResonanceLattice a;
    for (int i = 0; i < 5; ++i) a.entries.push_back({i, {0}, cplx(0.1 * i, -0.05), 0.0, 1});
    LatticeDiff same = lattice_diff(a, a, 1e-6);
    CHECK(same.matched == 5);
    CHECK(same.max_err == 0.0);

    ResonanceLattice b = a;
    for (auto& e : b.entries) e.z += 1e-9;
    LatticeDiff near = lattice_diff(a, b, 1e-6);
    CHECK(near.matched == 5);
    CHECK(near.max_err == doctest::Approx(1e-9).epsilon(1e-3));

    ResonanceLattice c = a;
    for (auto& e : c.entries) e.z += cplx(0, 1.0);
    LatticeDiff none = lattice_diff(a, c, 1e-3);
    CHECK(none.matched == 0);
    CHECK(none.unmatched_a.size() == 5);
    CHECK(none.unmatched_b.size() == 5);
}

TEST_CASE("hyp2 action, spacing and deepening") {
    const Built b = hyp2_family();
    REQUIRE_FALSE(b.family.failure);
    const double h = 0.02;
    SemiclassicalAction a = assemble_action(b.family, b.floquet, hyp2(), 0, h);
    // no elliptic block and no H1: s1 = -i pi, Im s1 = -Re mu / 2
    for (double e : {0.35, 0.5, 0.65}) CHECK(std::abs(a.s1(e) - cplx(0, -M_PI)) < 1e-6);

    SpectralWindow w{0.5, 0.1, 0.1, 1.0};
    ResonanceLattice lat = solve_bs(a, w);
    REQUIRE(lat.entries.size() > 10);
    std::map<int, std::map<int, cplx>> by_k;  // k -> m -> z
    for (const auto& e : lat.entries) {
        CHECK(w.contains(e.z, 1e-12));
        by_k[e.k[0]][e.m] = e.z;
    }
    const double period = 2 * M_PI;
    for (const auto& [k, row] : by_k) {
        for (auto it = std::next(row.begin()); it != row.end(); ++it) {
            auto prev = std::prev(it);
            if (it->first != prev->first + 1) continue;
            CHECK(std::abs(std::abs(it->second - prev->second) - 2 * M_PI * h / period) <= 1e-3 * h);
        }
    }
    for (auto it = std::next(by_k.begin()); it != by_k.end(); ++it) {
        const double im_prev = std::prev(it)->second.begin()->second.imag();
        CHECK(it->second.begin()->second.imag() < im_prev);
    }
}

TEST_CASE("misaligned inputs raise arity errors") {
    const Built b = hyp2_family();
    std::vector<FloquetData> short_floq(b.floquet.begin(), b.floquet.begin() + 3);
    CHECK_THROWS_AS(assemble_action(b.family, short_floq, hyp2(), 0, 0.02), ArityError);
}

TEST_CASE("thread count does not change the lattice") {
    const Built b = hyp2_family();
    SemiclassicalAction a = assemble_action(b.family, b.floquet, hyp2(), 2, 0.02);
    SpectralWindow w{0.5, 0.1, 0.1, 1.0};
    BsOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const ResonanceLattice x = solve_bs(a, w, {}, one), y = solve_bs(a, w, {}, four);
    REQUIRE(x.entries.size() == y.entries.size());
    for (std::size_t i = 0; i < x.entries.size(); ++i) {
        CHECK(x.entries[i].m == y.entries[i].m);
        CHECK(x.entries[i].k == y.entries[i].k);
        CHECK(x.entries[i].z == y.entries[i].z);
    }
}
