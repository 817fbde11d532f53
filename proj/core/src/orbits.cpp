#include "hypres/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "hypres/errors.hpp"
#include "hypres/spectral.hpp"

namespace hypres {

namespace {

double shooting_itol(double tol, double requested) {
    if (requested > 0.0) return requested;
    return std::clamp(tol * 1e-3, 1e-14, 1e-9);
}

std::vector<double> angle_periods_of(const HamiltonianSystem& sys) {
    std::vector<double> out(sys.dof());
    for (int i = 0; i < sys.dof(); ++i) out[i] = sys.angle_period(i);
    return out;
}

// Closing residual and its (x, T) jacobian.
struct Linearization {
    Vec closing;
    Mat jac_x;  // J - I
    Vec jac_t;  // X_H(Phi^T x)
};

Linearization linearize(const HamiltonianSystem& sys, const Vec& x, double period, double itol) {
    const VariationalState v = flow_with_variations(sys, PhasePoint::from_stacked(x), period, itol);
    Linearization lin;
    lin.closing = sys.wrap_difference(v.point.stacked() - x);
    lin.jac_x = v.jacobian - Mat::Identity(x.size(), x.size());
    lin.jac_t = hamiltonian_vector_field(sys, v.point);
    return lin;
}

double closing_norm(const HamiltonianSystem& sys, const Vec& x, double period, double itol) {
    const PhasePoint end = flow(sys, PhasePoint::from_stacked(x), period, itol);
    return sys.wrap_difference(end.stacked() - x).norm();
}

// Minimum-norm solve with the smallest singular direction removed
// (the energy direction of a periodic orbit, which the closing
// equations leave undetermined).
Vec truncated_solve(const Mat& a, const Vec& b, int drop) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const int r = static_cast<int>(s.size());
    const double cut = 1e-13 * (r > 0 ? s(0) : 0.0);
    Vec out = Vec::Zero(a.cols());
    for (int i = 0; i < r - drop; ++i) {
        if (s(i) <= cut) break;
        out += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(b) / s(i));
    }
    return out;
}

Vec least_squares(const Mat& a, const Vec& b) {
    return a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

struct NewtonResult {
    Vec x;
    double period;
    double residual;
};

// Shared Newton loop. If target_energy is set, the H(x) = E row is added
// and the system is solved in the least-squares sense; otherwise the
// energy direction is removed by truncation.
NewtonResult shooting_newton(const HamiltonianSystem& sys, Vec x, double period, const Vec& anchor,
                             const Vec& anchor_field, const double* target_energy, double tol,
                             int max_iter, double itol) {
    const int dim = static_cast<int>(x.size());
    const Vec fhat = anchor_field / anchor_field.norm();
    double res = std::numeric_limits<double>::infinity();
    double first = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        const Linearization lin = linearize(sys, x, period, itol);
        res = lin.closing.norm();
        double energy_gap = target_energy ? sys.h0(PhasePoint::from_stacked(x)) - *target_energy : 0.0;
        if (first < 0) first = res;
        if (res <= tol && std::abs(energy_gap) <= std::max(tol, 1e-12)) return {x, period, res};
        if (!std::isfinite(res) || res > 1e8 * std::max(first, 1.0))
            throw NoConvergence("shooting: Newton diverged", res);

        const int rows = dim + 1 + (target_energy ? 1 : 0);
        Mat a = Mat::Zero(rows, dim + 1);
        Vec b(rows);
        a.topLeftCorner(dim, dim) = lin.jac_x;
        a.block(0, dim, dim, 1) = lin.jac_t;
        a.block(dim, 0, 1, dim) = fhat.transpose();
        b.head(dim) = -lin.closing;
        b(dim) = -(x - anchor).dot(fhat);
        if (target_energy) {
            a.block(dim + 1, 0, 1, dim) = sys.grad_h0(PhasePoint::from_stacked(x)).transpose();
            b(dim + 1) = -energy_gap;
        }
        const Vec step = target_energy ? least_squares(a, b) : truncated_solve(a, b, 1);

        // backtracking on closing residual and energy gap together
        const double merit = std::hypot(res, energy_gap);
        double alpha = 1.0;
        Vec xn = x + step.head(dim);
        double tn = period + step(dim);
        for (int k = 0; k < 8; ++k) {
            xn = x + alpha * step.head(dim);
            tn = period + alpha * step(dim);
            if (tn > 0.0) {
                double rn;
                try {
                    rn = closing_norm(sys, xn, tn, itol);
                } catch (const IntegrationError&) {
                    rn = std::numeric_limits<double>::infinity();
                }
                const double gn =
                    target_energy ? sys.h0(PhasePoint::from_stacked(xn)) - *target_energy : 0.0;
                if (std::hypot(rn, gn) < merit || (rn <= tol && std::abs(gn) <= std::max(tol, 1e-12))) break;
            }
            alpha *= 0.5;
        }
        if (!(tn > 0.0)) throw NoConvergence("shooting: period became non-positive", res);
        x = xn;
        period = tn;
    }
    const double final_res = closing_norm(sys, x, period, itol);
    const double final_gap =
        target_energy ? std::abs(sys.h0(PhasePoint::from_stacked(x)) - *target_energy) : 0.0;
    if (final_res <= tol && final_gap <= std::max(tol, 1e-12)) return {x, period, final_res};
    throw NoConvergence("shooting: no convergence after " + std::to_string(max_iter) +
                            " iterations (residual " + std::to_string(final_res) + ")",
                        final_res);
}

PeriodicOrbit assemble(const HamiltonianSystem& sys, const Vec& x, double period, int samples,
                       double itol) {
    PeriodicOrbit orb;
    orb.sys_label = sys.label();
    orb.x0 = PhasePoint::from_stacked(x);
    orb.period = period;
    orb.energy = sys.h0(orb.x0);
    orb.samples = sample_orbit(sys, orb.x0, period, samples, itol);
    orb.residual = sys.wrap_difference(orb.samples.back().point.stacked() - x).norm();
    orb.angle_periods = angle_periods_of(sys);
    return orb;
}

void check_primitive(const HamiltonianSystem& sys, const Vec& x, double period, double itol) {
    for (int q : {2, 3}) {
        const double d = closing_norm(sys, x, period / q, itol);
        if (d <= 1e-6 * std::max(1.0, x.norm()))
            throw NoConvergence("shooting: solution is not primitive (closes after T/" +
                                    std::to_string(q) + ")",
                                d);
    }
}

}  // namespace

std::vector<OrbitSample> sample_orbit(const HamiltonianSystem& sys, const PhasePoint& x0,
                                      double period, int samples, double tol) {
    if (samples < 2) throw ContractError("sample_orbit: need at least two samples");
    std::vector<double> times(samples + 1);
    for (int k = 0; k <= samples; ++k) times[k] = period * k / samples;
    times.back() = period;
    const auto pts = flow_samples(sys, x0, times, tol);
    std::vector<OrbitSample> out(samples + 1);
    for (int k = 0; k <= samples; ++k) out[k] = {times[k], pts[k]};
    return out;
}

PeriodicOrbit find_periodic_orbit(const HamiltonianSystem& sys, const PhasePoint& guess,
                                  double guess_period, const ShootingOptions& opt) {
    if (!(guess_period > 0.0)) throw ContractError("find_periodic_orbit: guess_period must be > 0");
    if (!(opt.tol > 0.0)) throw ContractError("find_periodic_orbit: tol must be > 0");
    if (guess.dof() != sys.dof()) throw ContractError("find_periodic_orbit: guess has wrong dimension");
    const Vec g = guess.stacked();
    const Vec field = hamiltonian_vector_field(sys, guess);
    if (field.norm() <= 1e-12 * std::max(1.0, g.norm()))
        throw FixedPointError("find_periodic_orbit: vector field vanishes at the guess");
    const double itol = shooting_itol(opt.tol, opt.integration_tol);
    const NewtonResult nr =
        shooting_newton(sys, g, guess_period, g, field, nullptr, opt.tol, opt.max_iter, itol);
    if (std::abs(nr.period - guess_period) > 0.2 * guess_period)
        throw NoConvergence("find_periodic_orbit: period " + std::to_string(nr.period) +
                                " is more than 20% away from the guess",
                            nr.residual);
    check_primitive(sys, nr.x, nr.period, itol);
    return assemble(sys, nr.x, nr.period, opt.samples, itol);
}

PeriodicOrbit find_periodic_orbit(const HamiltonianSystem& sys, const PhasePoint& guess,
                                  double guess_period, double tol, int max_iter, int samples) {
    ShootingOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    opt.samples = samples;
    return find_periodic_orbit(sys, guess, guess_period, opt);
}

OrbitFamily continue_family(const HamiltonianSystem& sys, const PeriodicOrbit& seed, double e_min,
                            double e_max, int steps, const ShootingOptions& opt) {
    if (steps < 3) throw ArityError("continue_family: steps must be at least 3");
    if (e_max < e_min) throw ContractError("continue_family: e_max < e_min");
    const double slack = 1e-9 * std::max(1.0, std::abs(seed.energy));
    if (seed.energy < e_min - slack || seed.energy > e_max + slack)
        throw ContractError("continue_family: seed energy outside [e_min, e_max]");
    const double itol = shooting_itol(opt.tol, opt.integration_tol);

    std::vector<double> targets(steps);
    for (int i = 0; i < steps; ++i)
        targets[i] = (i == steps - 1) ? e_max : e_min + (e_max - e_min) * i / (steps - 1);
    int i0 = 0;
    for (int i = 1; i < steps; ++i)
        if (std::abs(targets[i] - seed.energy) < std::abs(targets[i0] - seed.energy)) i0 = i;

    struct Node {
        Vec x;
        double period;
    };
    std::vector<std::optional<Node>> nodes(steps);
    std::optional<std::string> failure;

    auto correct = [&](const Vec& xp, double tp, double e) {
        const Vec field = hamiltonian_vector_field(sys, PhasePoint::from_stacked(xp));
        return shooting_newton(sys, xp, tp, xp, field, &e, opt.tol, opt.max_iter, itol);
    };

    {
        const NewtonResult nr = correct(seed.x0.stacked(), seed.period, targets[i0]);
        nodes[i0] = Node{nr.x, nr.period};
    }
    for (int dir : {+1, -1}) {
        for (int i = i0 + dir; i >= 0 && i < steps; i += dir) {
            const Node& prev = *nodes[i - dir];
            Vec xp = prev.x;
            double tp = prev.period;
            const int j = i - 2 * dir;
            if (j >= 0 && j < steps && nodes[j]) {
                const double de = targets[i - dir] - targets[j];
                if (de != 0.0) {
                    const double s = (targets[i] - targets[i - dir]) / de;
                    xp = prev.x + s * sys.wrap_difference(prev.x - nodes[j]->x);
                    tp = prev.period + s * (prev.period - nodes[j]->period);
                }
            }
            try {
                const NewtonResult nr = correct(xp, tp, targets[i]);
                if (std::abs(nr.period - prev.period) > 0.2 * prev.period)
                    throw NoConvergence("period jumped by more than 20%", nr.residual);
                nodes[i] = Node{nr.x, nr.period};
            } catch (const Error& e) {
                const std::string msg = "continuation failed at E=" + std::to_string(targets[i]) +
                                        ": " + e.what();
                failure = failure ? *failure + "; " + msg : msg;
                break;
            }
        }
    }

    OrbitFamily fam;
    fam.failure = failure;
    for (int i = 0; i < steps; ++i) {
        if (!nodes[i]) continue;
        PeriodicOrbit orb = assemble(sys, nodes[i]->x, nodes[i]->period, opt.samples, itol);
        fam.orbits.push_back(std::move(orb));
    }
    const int m = static_cast<int>(fam.orbits.size());
    fam.energies.resize(m);
    fam.periods.resize(m);
    fam.actions.resize(m);
    for (int i = 0; i < m; ++i) {
        fam.energies(i) = fam.orbits[i].energy;
        fam.periods(i) = fam.orbits[i].period;
        fam.actions(i) = action_S0(fam.orbits[i]);
    }
    return fam;
}

double action_S0(const PeriodicOrbit& orbit) {
    const int total = static_cast<int>(orbit.samples.size());
    if (total < 3) throw ContractError("action_S0: orbit has too few samples");
    const int n = total - 1;  // last sample repeats the first point
    const int dof = orbit.samples.front().point.dof();
    const double period = orbit.period;
    if (!(period > 0.0)) throw ContractError("action_S0: period must be positive");
    double sum = 0.0;
    for (int i = 0; i < dof; ++i) {
        Vec q(n), p(n);
        for (int k = 0; k < n; ++k) {
            q(k) = orbit.samples[k].point.q(i);
            p(k) = orbit.samples[k].point.p(i);
        }
        // remove the linear drift of angle-like coordinates before
        // differentiating the periodic remainder
        const double drift = orbit.samples[n].point.q(i) - orbit.samples[0].point.q(i);
        for (int k = 0; k < n; ++k) q(k) -= drift * k / n;
        Vec qdot = spectral_derivative(q, period);
        qdot.array() += drift / period;
        sum += p.dot(qdot);
    }
    return sum * period / n;
}

DerivativeReport action_derivative_check(const OrbitFamily& family) {
    const Eigen::Index m = family.energies.size();
    if (m < 3 || family.actions.size() != m || family.periods.size() != m)
        throw ArityError("action_derivative_check: need at least three aligned orbits");
    DerivativeReport rep;
    for (Eigen::Index i = 1; i + 1 < m; ++i) {
        const double h1 = family.energies(i) - family.energies(i - 1);
        const double h2 = family.energies(i + 1) - family.energies(i);
        if (!(h1 > 0.0 && h2 > 0.0))
            throw ContractError("action_derivative_check: energies must be strictly increasing");
        const double slope = -family.actions(i - 1) * h2 / (h1 * (h1 + h2)) +
                             family.actions(i) * (h2 - h1) / (h1 * h2) +
                             family.actions(i + 1) * h1 / (h2 * (h1 + h2));
        const double t = family.periods(i);
        rep.max_rel_err = std::max(rep.max_rel_err, std::abs(slope - t) / std::abs(t));
    }
    return rep;
}

double subprincipal_integral(const PeriodicOrbit& orbit, const HamiltonianSystem& sys) {
    if (!sys.has_h1()) throw ConfigError("subprincipal_integral: system has no h1");
    const int n = static_cast<int>(orbit.samples.size()) - 1;
    if (n < 2) throw ContractError("subprincipal_integral: orbit has too few samples");
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += sys.h1(orbit.samples[k].point);
    return -sum * orbit.period / n;
}

}  // namespace hypres
