#pragma once

#include "hypres/linalg.hpp"

namespace hypres {

class CircleGrid {
public:
    CircleGrid(int n_points, double h);

    int n_points() const { return n_; }
    double h() const { return h_; }
    double spacing() const;
    // t_j = 2 pi j / n in [0, 2 pi)
    double t(int j) const;
    // the same point represented in (-pi, pi]
    double t_centered(int j) const;

private:
    int n_;
    double h_;
};

// Smooth even cutoff chi(t) = 1/2 (1 + erf((c - |t|)/sigma)) on (-pi, pi]:
// equal to 1 near t = 0 and to 0 near t = pi (to double precision).
class Cutoff {
public:
    static Cutoff smooth_step(const CircleGrid& grid, double center = 1.5707963267948966,
                              double sigma = 0.14);

    const Vec& values() const { return values_; }
    const Vec& derivative() const { return deriv_; }
    double center() const { return center_; }
    double sigma() const { return sigma_; }
    // transition arcs [c - 6 sigma, c + 6 sigma] and their mirror images
    double transition_half_width() const { return 6.0 * sigma_; }
    // chi evaluated on the continuum, t taken in (-pi, pi]
    double value_at(double t) const;
    // chi at the two ends of the unrolled circle [0, 2 pi], i.e.
    // chi^{a'} transported around; difference is the integral of chi'
    double unrolled_jump() const;

private:
    Cutoff(double c, double s, Vec v, Vec d) : center_(c), sigma_(s), values_(std::move(v)), deriv_(std::move(d)) {}
    double center_, sigma_;
    Vec values_, deriv_;
};

struct ChartSolutions {
    CVec u_a;   // exp(izt/h), t in (-pi, pi]
    CVec u_ap;  // exp(izt/h), t in [0, 2 pi)
};

ChartSolutions chart_solutions(const CircleGrid& grid, cplx z);

CMat gram_matrix(const CircleGrid& grid, cplx z, const Cutoff& chi);
cplx gram_determinant(const CircleGrid& grid, cplx z, const Cutoff& chi);

cplx effective_hamiltonian(cplx z, double h);

double verify_grushin_identity(const CircleGrid& grid, cplx z, const Cutoff& chi);

struct ResolventReport {
    double residual = 0.0;       // sup |direct - Grushin|
    double e_mp_error = 0.0;     // |E_-+ (discrete) - normalized 1 - exp(2 i pi z / h)|
    cplx e_mp;                   // discrete E_-+
};

ResolventReport resolvent_reconstruction_report(const CircleGrid& grid, cplx z, const Cutoff& chi,
                                                const CVec& rhs);
double resolvent_reconstruction(const CircleGrid& grid, cplx z, const Cutoff& chi, const CVec& rhs);

// (P - z)^{-1} rhs by division in Fourier space, P = h D_t.
CVec resolvent_fourier(const CircleGrid& grid, cplx z, const CVec& rhs);

}  // namespace hypres
