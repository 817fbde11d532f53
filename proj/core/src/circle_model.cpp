#include "hypres/circle_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hypres/errors.hpp"
#include "hypres/spectral.hpp"

namespace hypres {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// distance of z to the spectrum hZ of hD_t
double spectral_distance(cplx z, double h) {
    const double k = std::round(z.real() / h);
    return std::abs(z - k * h);
}

}  // namespace

CircleGrid::CircleGrid(int n_points, double h) : n_(n_points), h_(h) {
    if (n_points < 64 || !power_of_two(n_points))
        throw ContractError("CircleGrid: n_points must be a power of two >= 64");
    if (!(h > 0.0 && h <= 1.0)) throw ContractError("CircleGrid: h must lie in (0, 1]");
}

double CircleGrid::spacing() const { return 2.0 * kPi / n_; }
double CircleGrid::t(int j) const { return spacing() * j; }
double CircleGrid::t_centered(int j) const { return j <= n_ / 2 ? t(j) : t(j) - 2.0 * kPi; }

Cutoff Cutoff::smooth_step(const CircleGrid& grid, double center, double sigma) {
    if (sigma <= 0.0) sigma = std::max(0.14, 16.0 * grid.spacing() / 6.0);
    const double hw = 6.0 * sigma;
    const double slack = 1e-12;
    if (hw < 16.0 * grid.spacing() * (1.0 - slack))
        throw CutoffError("cutoff transition narrower than 16 grid cells");
    if (std::min(center, kPi - center) < hw * (1.0 - slack))
        throw CutoffError("cutoff transitions overlap t=0 or t=pi; chi must be 1 near 0 and 0 near pi");
    const int n = grid.n_points();
    Vec v(n), dv(n);
    for (int j = 0; j < n; ++j) {
        const double t = grid.t_centered(j);
        const double a = (center - std::abs(t)) / sigma;
        v(j) = 0.5 * (1.0 + std::erf(a));
        const double sgn = t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0);
        dv(j) = -sgn * std::exp(-a * a) / (sigma * std::sqrt(kPi));
    }
    return Cutoff(center, sigma, std::move(v), std::move(dv));
}

double Cutoff::value_at(double t) const {
    t = std::remainder(t, 2.0 * kPi);
    return 0.5 * (1.0 + std::erf((center_ - std::abs(t)) / sigma_));
}

double Cutoff::unrolled_jump() const {
    // chi^{a'} = 1 - chi transported from t = 0 to t = 2 pi along (0, 2 pi)
    // only changes through its transitions; end values are exact 0/1 for an
    // admissible cutoff
    return (1.0 - value_at(kPi)) - (1.0 - value_at(0.0));
}

ChartSolutions chart_solutions(const CircleGrid& grid, cplx z) {
    const int n = grid.n_points();
    ChartSolutions s{CVec(n), CVec(n)};
    for (int j = 0; j < n; ++j) {
        s.u_a(j) = std::exp(kI * z * grid.t_centered(j) / grid.h());
        s.u_ap(j) = std::exp(kI * z * grid.t(j) / grid.h());
    }
    return s;
}

namespace {

struct Commutators {
    CVec fa_plus, fa_minus, fap_plus, fap_minus;
};

// F^a_pm = chi' u^a, F^{a'}_pm = -chi' u^{a'}, split over (0, pi) / (-pi, 0)
Commutators commutators(const CircleGrid& grid, cplx z, const Cutoff& chi) {
    const ChartSolutions u = chart_solutions(grid, z);
    const int n = grid.n_points();
    Commutators c{CVec::Zero(n), CVec::Zero(n), CVec::Zero(n), CVec::Zero(n)};
    const Vec& dchi = chi.derivative();
    for (int j = 0; j < n; ++j) {
        const bool plus = grid.t_centered(j) > 0.0;
        const cplx fa = dchi(j) * u.u_a(j);
        const cplx fap = -dchi(j) * u.u_ap(j);
        (plus ? c.fa_plus : c.fa_minus)(j) = fa;
        (plus ? c.fap_plus : c.fap_minus)(j) = fap;
    }
    return c;
}

}  // namespace

CMat gram_matrix(const CircleGrid& grid, cplx z, const Cutoff& chi) {
    if (chi.values().size() != grid.n_points())
        throw CutoffError("cutoff was built on a different grid");
    const ChartSolutions u = chart_solutions(grid, z);
    // (u | F) = sum_j w u(t_j) conj(F(t_j; conj z)): F is taken at the
    // conjugate spectral parameter so the pairing is holomorphic in z
    const Commutators c = commutators(grid, std::conj(z), chi);
    const CVec fa = (c.fa_plus - c.fa_minus).conjugate();
    const CVec fap = (c.fap_plus - c.fap_minus).conjugate();
    const double w = grid.spacing();
    CMat g(2, 2);
    g(0, 0) = w * u.u_a.cwiseProduct(fa).sum();
    g(0, 1) = w * u.u_ap.cwiseProduct(fa).sum();
    g(1, 0) = w * u.u_a.cwiseProduct(fap).sum();
    g(1, 1) = w * u.u_ap.cwiseProduct(fap).sum();
    return g;
}

cplx gram_determinant(const CircleGrid& grid, cplx z, const Cutoff& chi) {
    return gram_matrix(grid, z, chi).determinant();
}

cplx effective_hamiltonian(cplx z, double h) {
    if (!(h > 0.0)) throw ContractError("effective_hamiltonian: h must be positive");
    return 1.0 - std::exp(2.0 * kI * kPi * z / h);
}

namespace {

CVec e_plus(const CircleGrid& grid, cplx z, const Cutoff& chi) {
    const ChartSolutions u = chart_solutions(grid, z);
    const Vec& c = chi.values();
    return c.cast<cplx>().cwiseProduct(u.u_a) + (1.0 - c.array()).matrix().cast<cplx>().cwiseProduct(u.u_ap);
}

// R_- : C -> grid functions, supported on (-pi, 0)
CVec r_minus(const CircleGrid& grid, cplx z, const Cutoff& chi) {
    const ChartSolutions u = chart_solutions(grid, z);
    CVec r = CVec::Zero(grid.n_points());
    for (int j = 0; j < grid.n_points(); ++j)
        if (grid.t_centered(j) < 0.0) r(j) = -chi.derivative()(j) * u.u_a(j);
    return r;
}

// R_+ u = int_{(0, pi)} e^{-izt/h} (chi^{a'})' u dt as a row of weights
CVec r_plus_weights(const CircleGrid& grid, cplx z, const Cutoff& chi) {
    CVec w = CVec::Zero(grid.n_points());
    for (int j = 0; j < grid.n_points(); ++j) {
        const double t = grid.t_centered(j);
        if (t > 0.0) w(j) = grid.spacing() * std::exp(-kI * z * t / grid.h()) * (-chi.derivative()(j));
    }
    return w;
}

// Fourier differentiation matrix on [0, 2 pi), n even
Mat differentiation_matrix(int n) {
    Mat d = Mat::Zero(n, n);
    const double dx = 2.0 * kPi / n;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (j != k) {
                const double s = ((j - k) % 2 == 0) ? 1.0 : -1.0;
                d(j, k) = 0.5 * s / std::tan((j - k) * dx / 2.0);
            }
    return d;
}

}  // namespace

double verify_grushin_identity(const CircleGrid& grid, cplx z, const Cutoff& chi) {
    const double h = grid.h();
    if (spectral_distance(z, h) < h / grid.n_points())
        throw ContractError("verify_grushin_identity: z lies on the spectrum hZ");
    const CVec ep = e_plus(grid, z, chi);
    const CVec lhs = spectral_derivative(ep, 2.0 * kPi) - (kI * z / h) * ep +
                     r_minus(grid, z, chi) * effective_hamiltonian(z, h);
    return lhs.cwiseAbs().maxCoeff();
}

CVec resolvent_fourier(const CircleGrid& grid, cplx z, const CVec& rhs) {
    const int n = grid.n_points();
    if (rhs.size() != n) throw ContractError("resolvent: rhs has wrong length");
    CVec rh = fft(rhs);
    const Vec k = wavenumbers(n, false);
    for (int j = 0; j < n; ++j) {
        const cplx den = grid.h() * k(j) - z;
        if (den == 0.0) throw PoleError("resolvent: z is an eigenvalue");
        rh(j) /= den;
    }
    return ifft(rh);
}

ResolventReport resolvent_reconstruction_report(const CircleGrid& grid, cplx z, const Cutoff& chi,
                                                const CVec& rhs) {
    const int n = grid.n_points();
    const double h = grid.h();
    if (rhs.size() != n) throw ContractError("resolvent: rhs has wrong length");
    const cplx emp_exact = effective_hamiltonian(z, h);
    if (std::abs(emp_exact) < 1e-13) throw PoleError("resolvent: E_-+(z) vanishes, z on the spectrum");

    // bordered Grushin matrix [[ (i/h)(P - z), R_- ], [ R_+, 0 ]]
    CMat big = CMat::Zero(n + 1, n + 1);
    big.topLeftCorner(n, n) = differentiation_matrix(n).cast<cplx>();
    big.topLeftCorner(n, n).diagonal().array() -= kI * z / h;
    big.block(0, n, n, 1) = r_minus(grid, z, chi);
    big.block(n, 0, 1, n) = r_plus_weights(grid, z, chi).transpose();
    const CMat inv = big.partialPivLu().inverse();
    const CMat e = inv.topLeftCorner(n, n);
    const CVec e_p = inv.block(0, n, n, 1);
    const CVec e_m = inv.block(n, 0, 1, n).transpose();
    const cplx e_mp = inv(n, n);
    if (std::abs(e_mp) < 1e-14) throw PoleError("resolvent: discrete E_-+ is singular");

    // (P - z)^{-1} = (i/h) (E - E_+ E_-+^{-1} E_-)
    const CVec grushin = (kI / h) * (e * rhs - e_p * (e_m.cwiseProduct(rhs).sum() / e_mp));
    const CVec direct = resolvent_fourier(grid, z, rhs);
    ResolventReport rep;
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    rep.residual = rhs.size() ? (grushin - direct).cwiseAbs().maxCoeff() / scale : 0.0;
    rep.e_mp = e_mp;
    rep.e_mp_error = std::abs(e_mp - emp_exact);
    return rep;
}

double resolvent_reconstruction(const CircleGrid& grid, cplx z, const Cutoff& chi, const CVec& rhs) {
    return resolvent_reconstruction_report(grid, z, chi, rhs).residual;
}

}  // namespace hypres
