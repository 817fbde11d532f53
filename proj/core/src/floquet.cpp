#include "hypres/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hypres/errors.hpp"

namespace hypres {

std::string to_string(ExponentType t) {
    switch (t) {
        case ExponentType::Elliptic: return "ee";
        case ExponentType::RealHyperbolic: return "hr";
        case ExponentType::ComplexHyperbolic: return "hc";
    }
    return "?";
}

ExponentType exponent_type_from_string(const std::string& s) {
    if (s == "ee") return ExponentType::Elliptic;
    if (s == "hr") return ExponentType::RealHyperbolic;
    if (s == "hc") return ExponentType::ComplexHyperbolic;
    throw ContractError("unknown exponent tag '" + s + "'");
}

namespace {

double omega(const Vec& a, const Vec& b) {
    const Eigen::Index n = a.size() / 2;
    return a.head(n).dot(b.tail(n)) - a.tail(n).dot(b.head(n));
}

// Orthonormal basis (columns) of the Euclidean complement of span(g, f).
Mat complement_basis(const Vec& g, const Vec& f) {
    const Eigen::Index dim = g.size();
    Mat span(dim, 2);
    span.col(0) = g;
    span.col(1) = f;
    Eigen::HouseholderQR<Mat> qr(span);
    const Mat q = qr.householderQ() * Mat::Identity(dim, dim);
    return q.rightCols(dim - 2);
}

// Symplectic Gram-Schmidt with pivoting on |omega|.
Mat darboux(const Mat& w) {
    const int m = static_cast<int>(w.cols());
    const int d = m / 2;
    std::vector<Vec> pool;
    for (int i = 0; i < m; ++i) pool.push_back(w.col(i));
    Mat b(w.rows(), m);
    for (int j = 0; j < d; ++j) {
        Vec e = pool.front();
        pool.erase(pool.begin());
        std::size_t best = 0;
        double bw = 0.0;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            const double o = std::abs(omega(e, pool[k]));
            if (o > bw) {
                bw = o;
                best = k;
            }
        }
        if (bw < 1e-12) throw SectionError("section basis: symplectic form degenerates");
        Vec f = pool[best];
        pool.erase(pool.begin() + static_cast<long>(best));
        const double s = omega(e, f);
        e /= std::sqrt(std::abs(s));
        f /= s / std::sqrt(std::abs(s));
        for (Vec& v : pool) v = v - omega(v, f) * e + omega(v, e) * f;
        b.col(j) = e;
        b.col(d + j) = f;
    }
    return b;
}

// Same without pivoting: pairs (b_j, b_{d+j}) in the given order.
// Used while transporting a frame so the basis moves continuously.
Mat darboux_ordered(const Mat& w) {
    const int m = static_cast<int>(w.cols());
    const int d = m / 2;
    Mat b = w;
    for (int j = 0; j < d; ++j) {
        Vec e = b.col(j), f = b.col(d + j);
        for (int i = 0; i < j; ++i) {
            const Vec ei = b.col(i), fi = b.col(d + i);
            e = e - omega(e, fi) * ei + omega(e, ei) * fi;
            f = f - omega(f, fi) * ei + omega(f, ei) * fi;
        }
        const double s = omega(e, f);
        if (std::abs(s) < 1e-10) throw DegeneracyError("frame transport: symplectic pairing collapsed");
        e /= std::sqrt(std::abs(s));
        f /= s / std::sqrt(std::abs(s));
        b.col(j) = e;
        b.col(d + j) = f;
    }
    return b;
}

Mat reduced_omega(int d) { return symplectic_form(2 * d); }

}  // namespace

Mat section_basis(const HamiltonianSystem& sys, const PhasePoint& x) {
    const Vec g = sys.grad_h0(x);
    if (sys.dim() < 4) throw SectionError("section basis: need at least two degrees of freedom");
    if (g.norm() <= 1e-12) throw SectionError("section basis: grad H vanishes, no transversal section");
    const Vec f = hamiltonian_vector_field(sys, x);
    return darboux(complement_basis(g, f));
}

Mat reduce_jacobian(const Mat& jacobian, const Mat& basis) {
    const int d = static_cast<int>(basis.cols() / 2);
    const Mat om = symplectic_form(static_cast<int>(jacobian.rows()));
    return -reduced_omega(d) * basis.transpose() * om * jacobian * basis;
}

Mat monodromy_matrix(const HamiltonianSystem& sys, const PeriodicOrbit& orbit, double tol) {
    const Mat b = section_basis(sys, orbit.x0);
    const VariationalState v = flow_with_variations(sys, orbit.x0, orbit.period, tol);
    return reduce_jacobian(v.jacobian, b);
}

FloquetData classify(const Mat& map, double tol) {
    if (map.rows() != map.cols() || map.rows() % 2 != 0 || map.rows() == 0)
        throw ContractError("classify: map must be square of even size");
    FloquetData fd;
    fd.reduced_map = map;
    const int dim = static_cast<int>(map.rows());
    const int d = dim / 2;
    fd.symplectic_defect = symplectic_defect(map);
    const double scale = std::max(1.0, map.cwiseAbs().maxCoeff());
    if (fd.symplectic_defect > tol * scale * scale)
        throw ContractError("classify: map is not symplectic (defect " +
                            std::to_string(fd.symplectic_defect) + ")");

    const CVec ev = eigenvalues(map);
    std::vector<cplx> lam(ev.data(), ev.data() + ev.size());
    std::sort(lam.begin(), lam.end(), [](cplx a, cplx b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        return a.imag() > b.imag();
    });
    fd.multipliers = lam;

    double dmin = std::numeric_limits<double>::infinity();
    for (const cplx& l : lam) {
        dmin = std::min(dmin, std::abs(l - 1.0));
        if (std::abs(l.imag()) <= tol * std::abs(l) && l.real() < 0.0) fd.hypothesis_violation = true;
    }
    fd.nondegenerate = dmin > std::sqrt(tol);

    // pair lambda with 1/lambda, then pick the member on the Re mu >= 0 side
    std::vector<bool> used(dim, false);
    struct Pick {
        cplx mu;
        ExponentType tag;
    };
    std::vector<Pick> picks;
    for (int i = 0; i < dim; ++i) {
        if (used[i]) continue;
        int partner = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < dim; ++j) {
            if (j == i || used[j]) continue;
            const double e = std::abs(lam[i] * lam[j] - 1.0);
            if (e < best) {
                best = e;
                partner = j;
            }
        }
        if (partner < 0) {
            fd.hypothesis_violation = true;
            used[i] = true;
            continue;
        }
        used[i] = used[partner] = true;
        cplx a = std::log(lam[i]), b = std::log(lam[partner]);
        cplx mu;
        if (std::abs(a.real()) > tol || std::abs(b.real()) > tol)
            mu = a.real() >= b.real() ? a : b;
        else
            mu = a.imag() >= b.imag() ? a : b;
        ExponentType tag;
        const cplx l = std::exp(mu);
        if (std::abs(std::abs(l) - 1.0) <= tol)
            tag = ExponentType::Elliptic;
        else if (std::abs(l.imag()) <= tol * std::abs(l))
            tag = ExponentType::RealHyperbolic;
        else
            tag = ExponentType::ComplexHyperbolic;
        if (tag == ExponentType::Elliptic) mu = cplx(0.0, mu.imag());
        picks.push_back({mu, tag});
    }
    if (static_cast<int>(picks.size()) != d) fd.hypothesis_violation = true;

    std::stable_sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
        const bool ea = a.tag == ExponentType::Elliptic, eb = b.tag == ExponentType::Elliptic;
        if (ea != eb) return !ea;
        if (!ea && a.mu.real() != b.mu.real()) return a.mu.real() > b.mu.real();
        return a.mu.imag() < b.mu.imag();
    });
    for (const Pick& p : picks) {
        fd.exponents.push_back(p.mu);
        fd.tags.push_back(p.tag);
        if (p.tag == ExponentType::Elliptic) ++fd.elliptic_count;
    }
    fd.windings.assign(fd.exponents.size(), 0);
    return fd;
}

NonresonanceReport check_nonresonance(const std::vector<cplx>& exponents, int K, double tol) {
    if (K < 1) throw ContractError("check_nonresonance: K must be at least 1");
    const int d = static_cast<int>(exponents.size());
    NonresonanceReport rep;
    rep.worst_distance = std::numeric_limits<double>::infinity();
    if (d == 0) return rep;
    std::vector<int> k(d, -K);
    const double two_pi = 2.0 * std::numbers::pi;
    while (true) {
        bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
        if (!zero) {
            cplx s = 0.0;
            for (int j = 0; j < d; ++j) s += static_cast<double>(k[j]) * exponents[j];
            const double m = std::round(s.imag() / two_pi);
            const double dist = std::abs(s - cplx(0.0, two_pi * m));
            if (dist < rep.worst_distance) {
                rep.worst_distance = dist;
                rep.worst_k = k;
            }
        }
        int j = 0;
        while (j < d && k[j] == K) k[j++] = -K;
        if (j == d) break;
        ++k[j];
    }
    rep.pass = rep.worst_distance > tol;
    return rep;
}

namespace {

struct FrameState {
    double t;
    PhasePoint x;
    Mat jac;
};

struct Tracker {
    const HamiltonianSystem& sys;
    Mat b0;
    double itol;
    int d;

    CVec spectrum(const FrameState& s) const {
        const Vec g = sys.grad_h0(s.x);
        const Vec f = hamiltonian_vector_field(sys, s.x);
        const Mat q = complement_basis(g, f);
        const Mat proj = q * q.transpose();
        const Mat bt = darboux_ordered(proj * b0);
        const Mat om = symplectic_form(sys.dim());
        const Mat r = -reduced_omega(d) * bt.transpose() * om * s.jac * b0;
        return eigenvalues(r);
    }

    FrameState advance(const FrameState& s, double dt) const {
        const VariationalState v = flow_with_variations(sys, s.x, dt, itol);
        return {s.t + dt, v.point, v.jacobian * s.jac};
    }
};

// Assign new eigenvalues to tracks by nearest predicted value; returns
// false when the assignment is ambiguous.
bool assign(const std::vector<cplx>& pred, const CVec& fresh, std::vector<int>& perm) {
    const int m = static_cast<int>(pred.size());
    perm.assign(m, -1);
    std::vector<bool> taken(m, false);
    for (int i = 0; i < m; ++i) {
        int best = -1;
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        for (int j = 0; j < m; ++j) {
            const double dist = std::abs(fresh(j) - pred[i]);
            if (dist < d1) {
                d2 = d1;
                d1 = dist;
                best = j;
            } else if (dist < d2) {
                d2 = dist;
            }
        }
        if (taken[best]) return false;
        if (m > 1 && d1 > 0.3 * d2 && d2 > 0) return false;
        taken[best] = true;
        perm[i] = best;
    }
    return true;
}

}  // namespace

EllipticIndex elliptic_windings(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                                const FloquetData& floq, double tol) {
    EllipticIndex out;
    out.windings.assign(floq.exponents.size(), 0);
    out.sweeps.assign(floq.exponents.size(), 0.0);
    if (floq.elliptic_count == 0) return out;

    Tracker tr{sys, section_basis(sys, orbit.x0), tol, sys.dof() - 1};
    const int m = 2 * tr.d;
    const int base_steps = 256;
    const double dt0 = orbit.period / base_steps;

    FrameState cur{0.0, orbit.x0, Mat::Identity(sys.dim(), sys.dim())};
    cur = tr.advance(cur, dt0);
    CVec ev = tr.spectrum(cur);
    std::vector<cplx> val(ev.data(), ev.data() + m), prev = val;
    std::vector<double> angle(m);
    for (int i = 0; i < m; ++i) angle[i] = std::arg(val[i]);
    // backward linear prediction from lambda(0) = 1
    for (int i = 0; i < m; ++i) prev[i] = 1.0;

    // Stop just short of T: at T an elliptic pair may sit exactly on -1,
    // where the two branches of the pair cannot be told apart.
    const double t_end = orbit.period * (1.0 - 1e-7);
    std::vector<int> perm;
    while (cur.t < t_end * (1.0 - 1e-14)) {
        double dt = std::min(dt0, t_end - cur.t);
        int depth = 0;
        while (true) {
            const FrameState next = tr.advance(cur, dt);
            const CVec fresh = tr.spectrum(next);
            const double ratio = dt / dt0;
            std::vector<cplx> pred(m);
            for (int i = 0; i < m; ++i) pred[i] = val[i] + ratio * (val[i] - prev[i]);
            bool ok = assign(pred, fresh, perm);
            if (ok)
                for (int i = 0; i < m; ++i)
                    if (std::abs(std::arg(fresh(perm[i]) / val[i])) > 0.5) ok = false;
            if (ok) {
                for (int i = 0; i < m; ++i) {
                    const cplx nv = fresh(perm[i]);
                    angle[i] += std::arg(nv / val[i]);
                    // value one base step back along the current secant
                    prev[i] = nv - (nv - val[i]) * (dt0 / dt);
                    val[i] = nv;
                }
                cur = next;
                break;
            }
            if (++depth > 14)
                throw DegeneracyError("elliptic_index: eigenvalue branches collide at t=" +
                                      std::to_string(cur.t));
            dt *= 0.5;
        }
    }

    // one positive-angle branch per elliptic pair
    std::vector<int> positive;
    for (int i = 0; i < m; ++i)
        if (std::abs(std::abs(val[i]) - 1.0) <= 1e-6 && angle[i] > 1e-9) positive.push_back(i);
    if (static_cast<int>(positive.size()) != floq.elliptic_count)
        throw DegeneracyError("elliptic_index: could not isolate elliptic branches (found " +
                              std::to_string(positive.size()) + ", expected " +
                              std::to_string(floq.elliptic_count) + ")");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<bool> taken(positive.size(), false);
    for (std::size_t j = 0; j < floq.exponents.size(); ++j) {
        if (floq.tags[j] != ExponentType::Elliptic) continue;
        const cplx target = std::exp(floq.exponents[j]);
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < positive.size(); ++i) {
            if (taken[i]) continue;
            const cplx v = val[positive[i]];
            const double dist = std::min(std::abs(v - target), std::abs(v - std::conj(target)));
            if (dist < bd) {
                bd = dist;
                best = static_cast<int>(i);
            }
        }
        taken[best] = true;
        const double sweep = angle[positive[best]];
        out.sweeps[j] = sweep;
        out.windings[j] = static_cast<int>(std::floor(sweep / two_pi + 1e-9));
        out.g_ell += out.windings[j];
    }
    return out;
}

int elliptic_index(const HamiltonianSystem& sys, const PeriodicOrbit& orbit, const FloquetData& floq) {
    return elliptic_windings(sys, orbit, floq).g_ell;
}

FloquetData floquet_analysis(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                             double integration_tol, double class_tol) {
    FloquetData fd = classify(monodromy_matrix(sys, orbit, integration_tol), class_tol);
    fd.energy = orbit.energy;
    const EllipticIndex ei = elliptic_windings(sys, orbit, fd, integration_tol);
    fd.g_ell = ei.g_ell;
    fd.windings = ei.windings;
    return fd;
}

double multiplier_symmetry_defect(const std::vector<cplx>& multipliers) {
    double worst = 0.0, scale = 0.0;
    for (const cplx& l : multipliers) scale = std::max(scale, std::abs(l));
    for (const cplx& l : multipliers) {
        double dinv = std::numeric_limits<double>::infinity(), dconj = dinv;
        for (const cplx& o : multipliers) {
            dinv = std::min(dinv, std::abs(o - 1.0 / l));
            dconj = std::min(dconj, std::abs(o - std::conj(l)));
        }
        worst = std::max({worst, dinv, dconj});
    }
    return scale > 0 ? worst / scale : worst;
}

}  // namespace hypres
