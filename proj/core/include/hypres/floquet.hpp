#pragma once

#include <string>
#include <vector>

#include "hypres/dynamics.hpp"
#include "hypres/orbits.hpp"

namespace hypres {

enum class ExponentType { Elliptic, RealHyperbolic, ComplexHyperbolic };

// "ee", "hr", "hc"
std::string to_string(ExponentType t);
ExponentType exponent_type_from_string(const std::string& s);

struct FloquetData {
    Mat reduced_map;
    std::vector<cplx> multipliers;  // 2d
    std::vector<cplx> exponents;    // d, per period
    std::vector<ExponentType> tags;
    bool nondegenerate = false;
    int elliptic_count = 0;
    int g_ell = 0;
    // winding count per exponent (0 for hyperbolic ones)
    std::vector<int> windings;
    bool hypothesis_violation = false;
    double symplectic_defect = 0.0;
    double energy = 0.0;
};

// Darboux basis of the symplectic complement of span(grad H, X_H) at x:
// columns e_1..e_d, f_1..f_d with B^T Omega B = Omega_d.
Mat section_basis(const HamiltonianSystem& sys, const PhasePoint& x);

// Restriction of a full jacobian J (mapping the section at x to itself) to
// the Darboux basis B: -Omega_d B^T Omega J B.
Mat reduce_jacobian(const Mat& jacobian, const Mat& basis);

Mat monodromy_matrix(const HamiltonianSystem& sys, const PeriodicOrbit& orbit, double tol);

FloquetData classify(const Mat& map, double tol = 1e-6);

struct NonresonanceReport {
    bool pass = true;
    std::vector<int> worst_k;
    double worst_distance = 0.0;
};

NonresonanceReport check_nonresonance(const std::vector<cplx>& exponents, int K, double tol);

struct EllipticIndex {
    int g_ell = 0;
    std::vector<int> windings;       // aligned with floq.exponents
    std::vector<double> sweeps;      // total angle swept, aligned likewise
};

EllipticIndex elliptic_windings(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                                const FloquetData& floq, double tol = 1e-10);

int elliptic_index(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                   const FloquetData& floq);

// monodromy + classify + elliptic index, filling g_ell / windings
FloquetData floquet_analysis(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                             double integration_tol = 1e-11, double class_tol = 1e-6);

// Multiset symmetry defect under lambda -> 1/lambda and lambda -> conj.
double multiplier_symmetry_defect(const std::vector<cplx>& multipliers);

}  // namespace hypres
