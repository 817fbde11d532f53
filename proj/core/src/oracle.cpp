#include "hypres/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "hypres/errors.hpp"

namespace hypres {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

}  // namespace

void GridSpec1D::validate() const {
    if (!(l > 0.0)) throw ContractError("GridSpec1D: l must be positive");
    if (n < 128) throw ContractError("GridSpec1D: n must be at least 128");
    if (!(theta >= 0.0 && theta < kPi / 2)) throw ContractError("GridSpec1D: theta must lie in [0, pi/2)");
    if (!(h > 0.0)) throw ContractError("GridSpec1D: h must be positive");
    if (points_per_wavelength() < 8.0)
        throw ContractError("GridSpec1D: fewer than 8 points per semiclassical wavelength (" +
                            std::to_string(points_per_wavelength()) + ")");
}

double GridSpec1D::spacing() const { return 2.0 * l / (n + 1); }
double GridSpec1D::y(int j) const { return -l + (j + 1) * spacing(); }
double GridSpec1D::points_per_wavelength() const { return 2.0 * kPi * h / spacing(); }

Mat second_derivative(const GridSpec1D& spec, Discretization disc) {
    const int n = spec.n;
    const double dx = spec.spacing();
    if (disc == Discretization::FiniteDifference2) {
        Mat d = Mat::Zero(n, n);
        for (int j = 0; j < n; ++j) {
            d(j, j) = -2.0 / (dx * dx);
            if (j > 0) d(j, j - 1) = 1.0 / (dx * dx);
            if (j + 1 < n) d(j, j + 1) = 1.0 / (dx * dx);
        }
        return d;
    }
    // sine basis (DST-I): D2 = S diag(-(pi k / L)^2) S, S symmetric orthogonal
    const double len = 2.0 * spec.l;
    Mat s(n, n);
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s(j, k) = norm * std::sin(kPi * (j + 1) * (k + 1) / (n + 1));
    Vec lam(n);
    for (int k = 0; k < n; ++k) lam(k) = -std::pow(kPi * (k + 1) / len, 2);
    return s * lam.asDiagonal() * s;
}

CMat scaled_inverted_oscillator(const GridSpec1D& spec, Discretization disc) {
    spec.validate();
    const cplx rot_kin = -std::exp(-2.0 * kI * spec.theta) * spec.h * spec.h;
    const cplx rot_pot = -std::exp(2.0 * kI * spec.theta);
    CMat op = rot_kin * second_derivative(spec, disc).cast<cplx>();
    for (int j = 0; j < spec.n; ++j) op(j, j) += rot_pot * spec.y(j) * spec.y(j);
    return op;
}

CMat scaled_model_operator(double mu, const GridSpec1D& spec, int n_fourier, Discretization disc) {
    if (!(mu > 0.0)) throw ContractError("scaled_model_operator: mu must be positive");
    if (n_fourier < 0) throw ContractError("scaled_model_operator: n_fourier must be >= 0");
    const CMat a = (mu / 2.0) * scaled_inverted_oscillator(spec, disc);
    const int n = spec.n;
    const int blocks = 2 * n_fourier + 1;
    if (static_cast<long>(blocks) * n > 20000)
        throw ContractError("scaled_model_operator: dimension exceeds dense desk scale");
    CMat op = CMat::Zero(blocks * n, blocks * n);
    for (int b = 0; b < blocks; ++b) {
        const int m = b - n_fourier;
        op.block(b * n, b * n, n, n) = a;
        op.block(b * n, b * n, n, n).diagonal().array() -= m * spec.h;
    }
    return op;
}

EigenResult all_eigenvalues(const CMat& op) {
    if (op.rows() > 20000) throw ContractError("eigenvalues: dimension exceeds 20000");
    CVec ev = eigenvalues(op);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (!std::isfinite(ev(i).real()) || !std::isfinite(ev(i).imag()))
            throw NumericalError("eigenvalues: non-finite eigenvalue returned");
    sort_by_real(ev);
    EigenResult r;
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    return r;
}

EigenResult eigenvalues_in_window(const CMat& op, const SpectralWindow& window) {
    window.validate();
    EigenResult all = all_eigenvalues(op);
    EigenResult r;
    for (const cplx& z : all.eigenvalues)
        if (window.contains(z)) r.eigenvalues.push_back(z);
    return r;
}

ResonanceLattice separable_reference(double h, double omega, int k_max, int n_max, int l_max) {
    if (!(h > 0.0)) throw ContractError("separable_reference: h must be positive");
    if (k_max < 0 || n_max < 0 || l_max < 0)
        throw ContractError("separable_reference: bounds must be nonnegative");
    const bool with_osc = omega > 0.0;
    ResonanceLattice lat;
    lat.h = h;
    for (int k = 0; k <= k_max; ++k)
        for (int l = 0; l <= (with_osc ? l_max : 0); ++l)
            for (int n = 0; n <= n_max; ++n) {
                const double re = h * (n + 0.5) + (with_osc ? h * omega * (l + 0.5) : 0.0);
                const cplx z(re, -h * (k + 0.5));
                auto it = std::find_if(lat.entries.begin(), lat.entries.end(), [&](const LatticeEntry& e) {
                    return std::abs(e.z - z) <= 1e-10 * h;
                });
                if (it != lat.entries.end()) {
                    ++it->multiplicity;
                    continue;
                }
                LatticeEntry e;
                e.m = n;
                e.k = with_osc ? std::vector<int>{k, l} : std::vector<int>{k};
                e.z = z;
                lat.entries.push_back(e);
            }
    return lat;
}

CalibrationCandidate score_against_reference(const ResonanceLattice& bs_lattice,
                                             const ResonanceLattice& reference,
                                             const SemiclassicalAction& action,
                                             const Conventions& conv, double tol) {
    CalibrationCandidate c;
    c.conventions = conv;
    std::map<std::pair<int, std::vector<int>>, cplx> ref;
    for (const auto& e : reference.entries) ref[{e.m, e.k}] = e.z;
    std::map<std::pair<int, std::vector<int>>, bool> seen;

    const auto& tags = action.tags();
    const auto& windings = action.windings();
    c.ok = true;
    for (const auto& e : bs_lattice.entries) {
        // reference label: hyperbolic k first, elliptic l after, and the
        // oscillator quantum number absorbs the elliptic windings
        std::vector<int> k_hyp, k_ell;
        int n = -e.m + conv.m_offset;
        for (std::size_t j = 0; j < e.k.size(); ++j) {
            if (tags[j] == ExponentType::Elliptic) {
                k_ell.push_back(e.k[j]);
                n -= windings[j] * e.k[j];
            } else {
                k_hyp.push_back(e.k[j]);
            }
        }
        std::vector<int> label = k_hyp;
        label.insert(label.end(), k_ell.begin(), k_ell.end());
        const auto it = ref.find({n, label});
        if (it == ref.end()) continue;  // outside the enumerated reference
        seen[{n, label}] = true;
        const double err = std::abs(it->second - e.z);
        ++c.matched;
        c.max_err = std::max(c.max_err, err);
        if (err > tol) c.ok = false;
    }
    if (c.matched == 0) c.ok = false;
    return c;
}

CalibrationReport calibrate_conventions(const SemiclassicalAction& action, const SpectralWindow& window,
                                        const ResonanceLattice& reference, double tol) {
    if (reference.entries.empty()) throw CalibrationFailure("calibration: empty reference lattice");
    if (std::abs(reference.h - action.h()) > 1e-12 * action.h())
        throw CalibrationFailure("calibration: reference and action use different h");
    bool has_ee = false;
    for (auto t : action.tags()) has_ee = has_ee || t == ExponentType::Elliptic;

    std::vector<CalibrationCandidate> ok;
    CalibrationCandidate best_fail;
    best_fail.max_err = std::numeric_limits<double>::infinity();
    for (int sgn : {1, -1}) {
        if (!has_ee && sgn == -1) continue;
        for (int g = -2; g <= 2; ++g) {
            Conventions conv{sgn, g, 0};
            const ResonanceLattice lat = solve_bs(action, window, conv);
            for (int mo = -2; mo <= 2; ++mo) {
                conv.m_offset = mo;
                const CalibrationCandidate c = score_against_reference(lat, reference, action, conv, tol);
                if (c.ok)
                    ok.push_back(c);
                else if (c.matched > 0 && c.max_err < best_fail.max_err)
                    best_fail = c;
            }
        }
    }
    if (ok.empty()) {
        std::string msg = "calibration: no convention tuple reaches tol";
        if (std::isfinite(best_fail.max_err)) msg += " (best max_err " + std::to_string(best_fail.max_err) + ")";
        throw CalibrationFailure(msg);
    }
    std::stable_sort(ok.begin(), ok.end(), [](const CalibrationCandidate& a, const CalibrationCandidate& b) {
        if (a.conventions.ee_sign != b.conventions.ee_sign) return a.conventions.ee_sign > b.conventions.ee_sign;
        const int ga = std::abs(a.conventions.g_ell_offset) + std::abs(a.conventions.m_offset);
        const int gb = std::abs(b.conventions.g_ell_offset) + std::abs(b.conventions.m_offset);
        if (ga != gb) return ga < gb;
        return a.max_err < b.max_err;
    });
    CalibrationReport rep;
    rep.conventions = ok.front().conventions;
    rep.max_err = ok.front().max_err;
    rep.matched = ok.front().matched;
    rep.candidates = static_cast<int>(ok.size());
    rep.unique = ok.size() == 1;
    return rep;
}

CalibrationReport calibrate_conventions(const ResonanceLattice& bs_lattice,
                                        const ResonanceLattice& reference, double tol) {
    if (bs_lattice.entries.empty() || reference.entries.empty())
        throw CalibrationFailure("calibration: empty lattice");
    if (std::abs(bs_lattice.h - reference.h) > 1e-12 * std::max(bs_lattice.h, reference.h))
        throw CalibrationFailure("calibration: lattices use different h");
    const LatticeDiff diff = lattice_diff(bs_lattice, reference, tol);
    if (!diff.unmatched_a.empty() || diff.matched == 0)
        throw CalibrationFailure("calibration: " + std::to_string(diff.unmatched_a.size()) +
                                 " entries without a partner within tol");
    CalibrationReport rep;
    rep.max_err = diff.max_err;
    rep.matched = diff.matched;
    rep.candidates = 1;
    return rep;
}

}  // namespace hypres
