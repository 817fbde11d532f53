#pragma once

#include <vector>

#include "hypres/bs.hpp"
#include "hypres/linalg.hpp"

namespace hypres {

struct GridSpec1D {
    double l = 4.0;
    int n = 1024;
    double theta = 0.7853981633974483;
    double h = 0.05;

    void validate() const;
    double spacing() const;  // 2l / (n + 1)
    double y(int j) const;   // interior node j = 0..n-1
    double points_per_wavelength() const;
};

enum class Discretization { Spectral, FiniteDifference2 };

// Dirichlet second derivative on the interior nodes.
Mat second_derivative(const GridSpec1D& spec, Discretization disc);

// -e^{-2 i theta} h^2 d^2/dy^2 - e^{2 i theta} y^2
CMat scaled_inverted_oscillator(const GridSpec1D& spec,
                                Discretization disc = Discretization::Spectral);

// block diagonal over Fourier modes m = -N..N:  -m h + (mu/2) A
CMat scaled_model_operator(double mu, const GridSpec1D& spec, int n_fourier,
                           Discretization disc = Discretization::Spectral);

struct EigenResult {
    std::vector<cplx> eigenvalues;  // sorted by real part
    double theta = 0.0;
    GridSpec1D params;
    int n_fourier = -1;
};

EigenResult eigenvalues_in_window(const CMat& op, const SpectralWindow& window);
EigenResult all_eigenvalues(const CMat& op);

// h(n + 1/2) + h omega (l + 1/2) - i h (k + 1/2), entries with labels
// m = n, k = (k, l). omega <= 0 drops the oscillator: h(n+1/2) - ih(k+1/2).
ResonanceLattice separable_reference(double h, double omega, int k_max, int n_max, int l_max);

struct CalibrationReport {
    Conventions conventions;
    double max_err = 0.0;
    int matched = 0;
    bool unique = true;
    int candidates = 0;  // number of tuples that satisfied the tolerance
};

struct CalibrationCandidate {
    Conventions conventions;
    double max_err = 0.0;
    int matched = 0;
    bool ok = false;
};

// Score of a BS lattice against a reference using label prediction.
CalibrationCandidate score_against_reference(const ResonanceLattice& bs_lattice,
                                             const ResonanceLattice& reference,
                                             const SemiclassicalAction& action,
                                             const Conventions& conv, double tol);

CalibrationReport calibrate_conventions(const SemiclassicalAction& action,
                                        const SpectralWindow& window,
                                        const ResonanceLattice& reference, double tol);

// Pairing by nearest neighbour only, for two ready-made lattices
// (offsets reported as zero): fails unless every entry matches.
CalibrationReport calibrate_conventions(const ResonanceLattice& bs_lattice,
                                        const ResonanceLattice& reference, double tol);

}  // namespace hypres
