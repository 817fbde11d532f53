#pragma once

#include <string>
#include <vector>

#include "hypres/dynamics.hpp"
#include "hypres/floquet.hpp"
#include "hypres/orbits.hpp"
#include "hypres/spline.hpp"

namespace hypres {

// The convention tuple fixed by calibration.
struct Conventions {
    int ee_sign = 1;
    int g_ell_offset = 0;
    int m_offset = 0;
    bool operator==(const Conventions&) const = default;
};

struct SpectralWindow {
    double e0 = 0.0;
    double eps0 = 0.1;
    double depth = 0.1;
    double c_const = 1.0;

    // depth defaults to C h log(1/h)
    static SpectralWindow standard(double e0, double eps0, double h, double C = 1.0,
                                   double c_const = 1.0);
    void validate() const;
    // closed window with an absolute slack on every edge
    bool contains(cplx z, double slack = 0.0) const;
    int k_bound(double h) const;
};

struct LatticeEntry {
    int m = 0;
    std::vector<int> k;
    cplx z;
    double newton_residual = 0.0;
    int multiplicity = 1;
};

struct ResonanceLattice {
    std::vector<LatticeEntry> entries;
    double h = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::pair<int, std::vector<int>>> skipped;
};

class SemiclassicalAction {
public:
    SemiclassicalAction() = default;

    // s0: E -> -J(E); sub: E -> -int H1; mu_j: per-period exponents
    SemiclassicalAction(CubicSpline s0, CubicSpline subprincipal, std::vector<ComplexSpline> mu,
                        std::vector<ExponentType> tags, std::vector<int> windings, int g_ell,
                        double h);

    cplx s0(cplx z) const { return s0_(z); }
    cplx ds0(cplx z) const { return s0_.derivative(z); }
    cplx s1(cplx z, const Conventions& c = {}) const;
    cplx ds1(cplx z, const Conventions& c = {}) const;
    cplx mu(std::size_t j, cplx z) const { return mu_[j](z); }
    cplx dmu(std::size_t j, cplx z) const { return mu_[j].derivative(z); }
    // sign applied to exponent j under the convention
    int sign(std::size_t j, const Conventions& c) const;

    int d() const { return static_cast<int>(mu_.size()); }
    double h() const { return h_; }
    int g_ell() const { return g_ell_; }
    const std::vector<ExponentType>& tags() const { return tags_; }
    const std::vector<int>& windings() const { return windings_; }
    double e_min() const { return s0_.x_min(); }
    double e_max() const { return s0_.x_max(); }
    SemiclassicalAction with_h(double h) const;

private:
    CubicSpline s0_, sub_;
    std::vector<ComplexSpline> mu_;
    std::vector<ExponentType> tags_;
    std::vector<int> windings_;
    int g_ell_ = 0;
    double h_ = 0.0;
};

SemiclassicalAction assemble_action(const OrbitFamily& family,
                                    const std::vector<FloquetData>& floquet_family,
                                    const HamiltonianSystem& sys, int g_ell, double h);

struct BsOptions {
    double residual_factor = 1e-12;  // times 2 pi h
    int max_newton = 60;
    int threads = 0;  // 0: HYPRES_THREADS or 1
};

ResonanceLattice solve_bs(const SemiclassicalAction& action, const SpectralWindow& window,
                          const Conventions& conv = {}, const BsOptions& opt = {});

struct LatticeDiff {
    int matched = 0;
    double max_err = 0.0;
    std::vector<int> unmatched_a;
    std::vector<int> unmatched_b;
    std::vector<std::pair<int, int>> pairs;
};

LatticeDiff lattice_diff(const ResonanceLattice& a, const ResonanceLattice& b, double tol);

// Number of worker threads from HYPRES_THREADS (>= 1).
int configured_threads();

}  // namespace hypres
