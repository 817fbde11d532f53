#include "hypres/model_quantum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "hypres/errors.hpp"

namespace hypres {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void for_each_k(int d, int kmax_inf, const std::function<void(const MultiIndex&)>& fn) {
    MultiIndex k(d, 0);
    while (true) {
        fn(k);
        int j = 0;
        while (j < d && k[j] == kmax_inf) k[j++] = 0;
        if (j == d) return;
        ++k[j];
    }
}

// exponent of the monodromy factor: -2 i pi z / h + sum (2 k_j + 1) pi mu_j
cplx factor_exponent(const ModelSpec& spec, cplx z, const MultiIndex& k) {
    cplx a = -2.0 * kI * kPi * z / spec.h;
    for (int j = 0; j < spec.d; ++j) a += (2.0 * k[j] + 1.0) * kPi * spec.mu_rates[j];
    return a;
}

}  // namespace

void ModelSpec::validate() const {
    if (d < 1) throw ContractError("ModelSpec: d must be at least 1");
    if (static_cast<int>(mu_rates.size()) != d || static_cast<int>(types.size()) != d)
        throw ContractError("ModelSpec: mu_rates/types must have length d");
    if (!(h > 0.0)) throw ContractError("ModelSpec: h must be positive");
    std::vector<bool> paired(d, false);
    for (int j = 0; j < d; ++j) {
        const cplx mu = mu_rates[j];
        switch (types[j]) {
            case ExponentType::RealHyperbolic:
                if (mu.imag() != 0.0 || !(mu.real() > 0.0))
                    throw ContractError("ModelSpec: hr rate must be real and positive");
                break;
            case ExponentType::Elliptic:
                if (mu.real() != 0.0 || !(mu.imag() > 0.0))
                    throw ContractError("ModelSpec: ee rate must be purely imaginary with Im > 0");
                break;
            case ExponentType::ComplexHyperbolic: {
                if (!(mu.real() > 0.0) || mu.imag() == 0.0)
                    throw ContractError("ModelSpec: hc rate needs Re > 0 and Im != 0");
                if (paired[j]) break;
                bool found = false;
                for (int i = j + 1; i < d && !found; ++i)
                    if (!paired[i] && types[i] == ExponentType::ComplexHyperbolic &&
                        std::abs(mu_rates[i] - std::conj(mu)) <= 1e-14 * std::abs(mu)) {
                        paired[i] = paired[j] = true;
                        found = true;
                    }
                if (!found) throw ContractError("ModelSpec: hc rate without its conjugate partner");
                break;
            }
        }
    }
}

ModelSpec ModelSpec::hyperbolic(double mu, double h) {
    ModelSpec s;
    s.d = 1;
    s.mu_rates = {mu};
    s.types = {ExponentType::RealHyperbolic};
    s.h = h;
    s.validate();
    return s;
}

QuadraticSymbol quadratic_symbol(ExponentType type, cplx mu) {
    QuadraticSymbol q;
    q.type = type;
    q.mu = mu;
    switch (type) {
        case ExponentType::RealHyperbolic:
            if (mu.imag() != 0.0 || !(mu.real() > 0.0))
                throw ContractError("quadratic_symbol: hr needs real mu > 0");
            q.terms[{1, 1}] = mu;
            q.text = fmt(mu.real()) + "*x*xi";
            break;
        case ExponentType::Elliptic: {
            if (mu.real() != 0.0 || !(mu.imag() > 0.0))
                throw ContractError("quadratic_symbol: ee needs mu = i|mu|");
            const cplx c = -kI * mu / 2.0;  // = |mu|/2
            q.terms[{2, 0}] = c;
            q.terms[{0, 2}] = c;
            q.text = fmt(c.real()) + "*(xi^2+x^2)";
            break;
        }
        case ExponentType::ComplexHyperbolic:
            if (!(mu.real() > 0.0) || mu.imag() == 0.0)
                throw ContractError("quadratic_symbol: hc needs Re mu > 0 and Im mu != 0");
            q.c = mu.real();
            q.d = mu.imag();
            q.terms[{1, 1, 0, 0}] = q.c;
            q.terms[{0, 0, 1, 1}] = q.c;
            q.terms[{1, 0, 0, 1}] = -q.d;
            q.terms[{0, 1, 1, 0}] = q.d;
            q.text = fmt(q.c) + "*(x1*xi1+x2*xi2)-" + fmt(q.d) + "*(x1*xi2-x2*xi1)";
            break;
    }
    return q;
}

TimeCutoff time_cutoff(double center, double width) {
    if (!(width > 0.0)) throw CutoffError("time cutoff: width must be positive");
    if (center / width < 6.0 || (2.0 * kPi - center) / width < 6.0)
        throw CutoffError("time cutoff: transition too close to the ends of [0, 2 pi]");
    TimeCutoff c;
    c.start_value = 0.5 * (1.0 + std::erf((0.0 - center) / width));
    c.end_value = 0.5 * (1.0 + std::erf((2.0 * kPi - center) / width));
    return c;
}

cplx monodromy_factor(const ModelSpec& spec, cplx e, const MultiIndex& k) {
    if (static_cast<int>(k.size()) != spec.d) throw ContractError("monodromy: multi-index has wrong length");
    return std::exp(factor_exponent(spec, e, k));
}

MonomialState monodromy_apply(const ModelSpec& spec, cplx e, const MonomialState& state,
                              const TimeCutoff& chi) {
    spec.validate();
    // the cutoff enters only through int chi' dt = chi(2 pi) - chi(0)
    const double weight = chi.end_value - chi.start_value;
    MonomialState out;
    for (const auto& [k, amp] : state.coefficients) {
        for (int v : k)
            if (v < 0) throw ContractError("monodromy: negative multi-index");
        out.coefficients[k] = amp * weight * monodromy_factor(spec, e, k);
    }
    return out;
}

ResonanceLattice model_resonances(const ModelSpec& spec, const SpectralWindow& window) {
    spec.validate();
    window.validate();
    const double h = spec.h;
    ResonanceLattice lat;
    lat.h = h;
    const int kmax = window.k_bound(h);
    // graded enumeration |k|_1 <= kmax
    std::vector<MultiIndex> ks;
    for_each_k(spec.d, kmax, [&](const MultiIndex& k) {
        int s = 0;
        for (int v : k) s += v;
        if (s <= kmax) ks.push_back(k);
    });
    for (const auto& k : ks) {
        cplx shift = 0.0;
        for (int j = 0; j < spec.d; ++j) shift += -kI * h * spec.mu_rates[j] * (k[j] + 0.5);
        const int m_lo = static_cast<int>(std::ceil((window.e0 - window.eps0 - shift.real()) / h)) - 1;
        const int m_hi = static_cast<int>(std::floor((window.e0 + window.eps0 - shift.real()) / h)) + 1;
        for (int m = m_lo; m <= m_hi; ++m) {
            const cplx z = static_cast<double>(m) * h + shift;
            if (!window.contains(z, 1e-9 * h)) continue;
            LatticeEntry e;
            e.m = m;
            e.k = k;
            e.z = z;
            e.newton_residual = 0.0;
            lat.entries.push_back(e);
        }
    }
    // merge coincident points (commensurate rates), keeping the first label
    std::vector<LatticeEntry> merged;
    for (const auto& e : lat.entries) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const LatticeEntry& o) {
            return std::abs(o.z - e.z) <= 1e-10 * h;
        });
        if (it != merged.end())
            ++it->multiplicity;
        else
            merged.push_back(e);
    }
    lat.entries = std::move(merged);
    if (lat.entries.empty()) lat.warnings.push_back("empty lattice in window");
    return lat;
}

cplx truncated_monodromy_determinant(const ModelSpec& spec, cplx z, int k_max) {
    spec.validate();
    if (k_max < 0) throw ContractError("truncated determinant: k_max must be >= 0");
    cplx det = 1.0;
    for_each_k(spec.d, k_max, [&](const MultiIndex& k) { det *= 1.0 - std::exp(factor_exponent(spec, z, k)); });
    return det;
}

cplx truncated_monodromy_determinant_derivative(const ModelSpec& spec, cplx z, int k_max) {
    spec.validate();
    if (k_max < 0) throw ContractError("truncated determinant: k_max must be >= 0");
    std::vector<cplx> f, df;
    const cplx da = -2.0 * kI * kPi / spec.h;
    for_each_k(spec.d, k_max, [&](const MultiIndex& k) {
        const cplx e = std::exp(factor_exponent(spec, z, k));
        f.push_back(1.0 - e);
        df.push_back(-e * da);
    });
    cplx total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        cplx term = df[i];
        for (std::size_t j = 0; j < f.size(); ++j)
            if (j != i) term *= f[j];
        total += term;
    }
    return total;
}

cplx locate_determinant_zero(const ModelSpec& spec, cplx z_guess, int k_max, double tol) {
    spec.validate();
    if (!(tol > 0.0)) throw ContractError("locate_determinant_zero: tol must be positive");
    cplx z = z_guess;
    const cplx da = -2.0 * kI * kPi / spec.h;
    double step_size = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        // Newton on the determinant with every factor 1 - e^a rescaled by a
        // zero-free function: sinh(a/2) near |e^a| = 1, 1 - e^{-a} for
        // Re a large, 1 - e^a for Re a very negative. Without this the
        // exponentially large factors swamp the log-derivative.
        cplx logd = 0.0;
        bool exact_zero = false;
        for_each_k(spec.d, k_max, [&](const MultiIndex& k) {
            const cplx a = factor_exponent(spec, z, k);
            if (a.real() > 3.0) {
                logd += da / (std::exp(a) - 1.0);
            } else if (a.real() < -3.0) {
                const cplx e = std::exp(a);
                logd += -e * da / (1.0 - e);
            } else {
                const cplx s = std::sinh(0.5 * a);
                if (s == 0.0)
                    exact_zero = true;
                else
                    logd += 0.5 * da * std::cosh(0.5 * a) / s;
            }
        });
        if (exact_zero) return z;
        const cplx step = 1.0 / logd;
        z -= step;
        step_size = std::abs(step);
        if (step_size <= tol) return z;
    }
    throw NoConvergence("locate_determinant_zero: Newton did not converge", step_size);
}

SemiclassicalAction model_action(const ModelSpec& spec, double e_min, double e_max, int knots) {
    spec.validate();
    if (knots < 2 || !(e_max > e_min)) throw ContractError("model_action: bad energy grid");
    std::vector<double> e(knots), s0(knots), sub(knots, 0.0);
    for (int i = 0; i < knots; ++i) {
        e[i] = (i == knots - 1) ? e_max : e_min + (e_max - e_min) * i / (knots - 1);
        // the model orbit has J(E) = 2 pi E; s0 = -J
        s0[i] = -2.0 * kPi * e[i];
    }
    std::vector<ComplexSpline> mus;
    for (int j = 0; j < spec.d; ++j)
        mus.emplace_back(e, std::vector<cplx>(knots, 2.0 * kPi * spec.mu_rates[j]));
    return SemiclassicalAction(CubicSpline(e, s0), CubicSpline(e, sub), std::move(mus), spec.types,
                               std::vector<int>(spec.d, 0), 0, spec.h);
}

}  // namespace hypres
