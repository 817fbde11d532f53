#include "hypres/bs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "hypres/errors.hpp"

namespace hypres {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kI(0.0, 1.0);

// all k in N^d with |k|_1 <= kmax, in graded lexicographic order
std::vector<std::vector<int>> enumerate_k(int d, int kmax) {
    std::vector<std::vector<int>> out;
    std::vector<int> k(d, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == d) {
            out.push_back(k);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            k[j] = v;
            rec(j + 1, left - v);
        }
        k[j] = 0;
    };
    if (d == 0) return {{}};
    rec(0, kmax);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::accumulate(a.begin(), a.end(), 0) < std::accumulate(b.begin(), b.end(), 0);
    });
    return out;
}

}  // namespace

int configured_threads() {
    if (const char* env = std::getenv("HYPRES_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

SpectralWindow SpectralWindow::standard(double e0, double eps0, double h, double C, double c_const) {
    SpectralWindow w;
    w.e0 = e0;
    w.eps0 = eps0;
    w.depth = C * h * std::log(1.0 / h);
    w.c_const = c_const;
    w.validate();
    return w;
}

void SpectralWindow::validate() const {
    if (!(eps0 > 0.0)) throw ContractError("window: eps0 must be positive");
    if (!(depth > 0.0)) throw ContractError("window: depth must be positive");
    if (!(c_const >= 0.0)) throw ContractError("window: c_const must be nonnegative");
    if (!std::isfinite(e0)) throw ContractError("window: e0 must be finite");
}

bool SpectralWindow::contains(cplx z, double slack) const {
    return std::abs(z.real() - e0) <= eps0 + slack && z.imag() >= -depth - slack &&
           z.imag() <= slack;
}

int SpectralWindow::k_bound(double h) const {
    if (c_const <= 0.0 || h >= 1.0) return 0;
    return static_cast<int>(std::floor(c_const * std::log(1.0 / h) + 1e-12));
}

SemiclassicalAction::SemiclassicalAction(CubicSpline s0, CubicSpline subprincipal,
                                         std::vector<ComplexSpline> mu,
                                         std::vector<ExponentType> tags, std::vector<int> windings,
                                         int g_ell, double h)
    : s0_(std::move(s0)), sub_(std::move(subprincipal)), mu_(std::move(mu)), tags_(std::move(tags)),
      windings_(std::move(windings)), g_ell_(g_ell), h_(h) {
    if (!(h_ > 0.0)) throw ContractError("SemiclassicalAction: h must be positive");
    if (mu_.size() != tags_.size()) throw ArityError("SemiclassicalAction: exponent/tag mismatch");
    if (windings_.empty()) windings_.assign(mu_.size(), 0);
    if (windings_.size() != mu_.size()) throw ArityError("SemiclassicalAction: winding mismatch");
}

int SemiclassicalAction::sign(std::size_t j, const Conventions& c) const {
    return tags_[j] == ExponentType::Elliptic ? c.ee_sign : 1;
}

cplx SemiclassicalAction::s1(cplx z, const Conventions& c) const {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < mu_.size(); ++j) sum += static_cast<double>(sign(j, c)) * mu_[j](z);
    return sub_(z) + sum / (2.0 * kI) + std::numbers::pi * (g_ell_ + c.g_ell_offset) / 2.0;
}

cplx SemiclassicalAction::ds1(cplx z, const Conventions& c) const {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < mu_.size(); ++j)
        sum += static_cast<double>(sign(j, c)) * mu_[j].derivative(z);
    return sub_.derivative(z) + sum / (2.0 * kI);
}

SemiclassicalAction SemiclassicalAction::with_h(double h) const {
    SemiclassicalAction a = *this;
    if (!(h > 0.0)) throw ContractError("SemiclassicalAction: h must be positive");
    a.h_ = h;
    return a;
}

SemiclassicalAction assemble_action(const OrbitFamily& family,
                                    const std::vector<FloquetData>& floquet_family,
                                    const HamiltonianSystem& sys, int g_ell, double h) {
    const std::size_t n = family.orbits.size();
    if (n != floquet_family.size() || static_cast<Eigen::Index>(n) != family.energies.size() ||
        static_cast<Eigen::Index>(n) != family.actions.size())
        throw ArityError("assemble_action: family and Floquet data are not aligned");
    if (n < 2) throw ArityError("assemble_action: need at least two family members");
    const std::size_t d = floquet_family.front().exponents.size();
    for (const auto& f : floquet_family)
        if (f.exponents.size() != d) throw ArityError("assemble_action: inconsistent exponent count");

    std::vector<double> e(n), s0(n), sub(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = family.energies(static_cast<Eigen::Index>(i));
        s0[i] = -family.actions(static_cast<Eigen::Index>(i));
        if (sys.has_h1()) sub[i] = subprincipal_integral(family.orbits[i], sys);
        if (std::abs(floquet_family[i].energy - e[i]) > 1e-8 * std::max(1.0, std::abs(e[i])) &&
            floquet_family[i].energy != 0.0)
            throw ArityError("assemble_action: Floquet data energy does not match family energy");
    }

    // align exponent order along the family by continuity
    std::vector<std::vector<cplx>> mu(n, std::vector<cplx>(d));
    std::vector<ExponentType> tags = floquet_family.front().tags;
    mu[0] = floquet_family[0].exponents;
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<std::size_t> perm(d);
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::size_t> best = perm;
        double best_cost = std::numeric_limits<double>::infinity();
        do {
            double c = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                c += std::abs(floquet_family[i].exponents[perm[j]] - mu[i - 1][j]);
            if (c < best_cost) {
                best_cost = c;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (std::size_t j = 0; j < d; ++j) {
            mu[i][j] = floquet_family[i].exponents[best[j]];
            if (floquet_family[i].tags[best[j]] != tags[j])
                throw ArityError("assemble_action: exponent type changes along the family");
        }
    }
    std::vector<ComplexSpline> mus;
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<cplx> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = mu[i][j];
        mus.emplace_back(e, col);
    }
    std::vector<int> windings = floquet_family[n / 2].windings;
    if (windings.size() != d) windings.assign(d, 0);
    return SemiclassicalAction(CubicSpline(e, s0), CubicSpline(e, sub), std::move(mus), tags,
                               std::move(windings), g_ell, h);
}

namespace {

struct Job {
    int m;
    const std::vector<int>* k;
};

struct Outcome {
    bool ok = false;
    bool inside = false;
    LatticeEntry entry;
};

Outcome solve_one(const SemiclassicalAction& a, const SpectralWindow& w, const Conventions& c,
                  const Job& job, const BsOptions& opt) {
    const double h = a.h();
    const int d = a.d();
    auto f = [&](cplx z, cplx& df) {
        cplx v = a.s0(z) + h * a.s1(z, c) - kTwoPi * job.m * h;
        df = a.ds0(z) + h * a.ds1(z, c);
        for (int j = 0; j < d; ++j) {
            const double kj = static_cast<double>((*job.k)[j] * a.sign(j, c));
            v += (h / kI) * kj * a.mu(j, z);
            df += (h / kI) * kj * a.dmu(j, z);
        }
        return v;
    };
    const double target = opt.residual_factor * kTwoPi * h;
    Outcome out;
    cplx df;
    cplx z = w.e0;
    cplx v = f(z, df);
    z -= v / df;  // leading-order start from the window centre
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_newton; ++it) {
        v = f(z, df);
        res = std::abs(v);
        if (!std::isfinite(res) || df == 0.0) break;
        if (res <= target) {
            // one polishing step, kept only if it does not make things worse
            const cplx z2 = z - v / df;
            cplx df2;
            const double r2 = std::abs(f(z2, df2));
            if (r2 <= res) {
                z = z2;
                res = r2;
            }
            out.ok = true;
            break;
        }
        z -= v / df;
    }
    out.entry.m = job.m;
    out.entry.k = *job.k;
    out.entry.z = z;
    out.entry.newton_residual = res;
    out.inside = out.ok && w.contains(z, 1e-9 * h);
    return out;
}

}  // namespace

ResonanceLattice solve_bs(const SemiclassicalAction& action, const SpectralWindow& window,
                          const Conventions& conv, const BsOptions& opt) {
    window.validate();
    const double h = action.h();
    ResonanceLattice lat;
    lat.h = h;
    if (window.e0 + window.eps0 < action.e_min() || window.e0 - window.eps0 > action.e_max())
        throw ContractError("solve_bs: window does not overlap the family energy range");
    if (window.e0 - window.eps0 < action.e_min() || window.e0 + window.eps0 > action.e_max())
        lat.warnings.push_back("window extends beyond the family energy range; splines extrapolated");

    const auto ks = enumerate_k(action.d(), window.k_bound(h));
    std::vector<Job> jobs;
    for (const auto& k : ks) {
        // m range from the real part of the left side at the window edges
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double e : {window.e0 - window.eps0, window.e0, window.e0 + window.eps0}) {
            cplx v = action.s0(e) + h * action.s1(e, conv);
            for (int j = 0; j < action.d(); ++j)
                v += (h / kI) * static_cast<double>(k[j] * action.sign(j, conv)) * action.mu(j, e);
            lo = std::min(lo, v.real());
            hi = std::max(hi, v.real());
        }
        const int m_lo = static_cast<int>(std::floor(lo / (kTwoPi * h))) - 2;
        const int m_hi = static_cast<int>(std::ceil(hi / (kTwoPi * h))) + 2;
        for (int m = m_lo; m <= m_hi; ++m) jobs.push_back({m, &k});
    }

    std::vector<Outcome> results(jobs.size());
    const int threads = std::max(1, opt.threads > 0 ? opt.threads : configured_threads());
    if (threads == 1 || jobs.size() < 64) {
        for (std::size_t i = 0; i < jobs.size(); ++i)
            results[i] = solve_one(action, window, conv, jobs[i], opt);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < jobs.size(); i += threads)
                    results[i] = solve_one(action, window, conv, jobs[i], opt);
            });
        for (auto& th : pool) th.join();
    }
    for (const Outcome& o : results) {
        if (!o.ok) {
            lat.skipped.emplace_back(o.entry.m, o.entry.k);
            continue;
        }
        if (o.inside) lat.entries.push_back(o.entry);
    }
    std::sort(lat.entries.begin(), lat.entries.end(), [](const LatticeEntry& a, const LatticeEntry& b) {
        if (a.k != b.k) return a.k < b.k;
        return a.m < b.m;
    });
    if (!lat.skipped.empty())
        lat.warnings.push_back(std::to_string(lat.skipped.size()) +
                               " (m,k) pairs skipped after Newton failure");
    if (lat.entries.empty()) lat.warnings.push_back("empty lattice in window");
    return lat;
}

LatticeDiff lattice_diff(const ResonanceLattice& a, const ResonanceLattice& b, double tol) {
    struct Cand {
        double dist;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(a.entries.size()); ++i)
        for (int j = 0; j < static_cast<int>(b.entries.size()); ++j) {
            const double dist = std::abs(a.entries[i].z - b.entries[j].z);
            if (dist <= tol) cands.push_back({dist, i, j});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<bool> ua(a.entries.size(), false), ub(b.entries.size(), false);
    LatticeDiff out;
    for (const Cand& c : cands) {
        if (ua[c.i] || ub[c.j]) continue;
        ua[c.i] = ub[c.j] = true;
        ++out.matched;
        out.max_err = std::max(out.max_err, c.dist);
        out.pairs.emplace_back(c.i, c.j);
    }
    for (int i = 0; i < static_cast<int>(ua.size()); ++i)
        if (!ua[i]) out.unmatched_a.push_back(i);
    for (int j = 0; j < static_cast<int>(ub.size()); ++j)
        if (!ub[j]) out.unmatched_b.push_back(j);
    return out;
}

}  // namespace hypres
