#include "hypres/systems.hpp"

#include <cmath>
#include <numbers>

#include "hypres/errors.hpp"

namespace hypres {

namespace {

// Quadratic Hamiltonian 1/2 x^T A x in stacked coordinates.
HamiltonianSystem quadratic(const std::string& label, const Mat& a) {
    const int dof = static_cast<int>(a.rows() / 2);
    return HamiltonianSystem(
        label, dof,
        [a](const PhasePoint& x) {
            const Vec s = x.stacked();
            return 0.5 * s.dot(a * s);
        },
        [a](const PhasePoint& x) -> Vec { return a * x.stacked(); },
        [a](const PhasePoint&) -> Mat { return a; });
}

// d^{(i,j)} of prod_k s_k^{e_k}; i, j = -1 for no derivative
double monomial(const std::vector<int>& e, const Vec& s, int i = -1, int j = -1) {
    double val = 1.0;
    for (int k = 0; k < static_cast<int>(e.size()); ++k) {
        int p = e[k];
        double coef = 1.0;
        if (k == i) {
            coef *= p;
            --p;
        }
        if (k == j) {
            coef *= p;
            --p;
        }
        if (coef == 0.0) return 0.0;
        val *= coef * std::pow(s(k), p);
    }
    return val;
}

}  // namespace

HamiltonianSystem hyp2() {
    Mat a = Mat::Zero(4, 4);
    a(0, 0) = 1.0;   // x
    a(1, 1) = -1.0;  // y
    a(2, 2) = 1.0;
    a(3, 3) = 1.0;
    return quadratic("hyp2", a);
}

HamiltonianSystem semihyp3(double omega) {
    Mat a = Mat::Zero(6, 6);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    a(2, 2) = omega * omega;
    a(3, 3) = a(4, 4) = a(5, 5) = 1.0;
    return quadratic("semihyp3", a);
}

HamiltonianSystem harmonic_oscillator() {
    return quadratic("harmonic", Mat::Identity(2, 2));
}

HamiltonianSystem inverted_oscillator() {
    Mat a(2, 2);
    a << -2.0, 0.0, 0.0, 2.0;
    return quadratic("inverted", a);
}

HamiltonianSystem diabolo2() {
    // V = f(z)^-2 sech^2(y) - 1 with f = 2z^4 - z^2 + 1
    struct Parts {
        double a, az, azz, b, by, byy;
    };
    auto parts = [](double y, double z) {
        const double f = 2 * z * z * z * z - z * z + 1;
        const double f1 = 8 * z * z * z - 2 * z;
        const double f2 = 24 * z * z - 2;
        const double sech2 = 1.0 / (std::cosh(y) * std::cosh(y));
        const double th = std::tanh(y);
        Parts p;
        p.a = 1.0 / (f * f);
        p.az = -2.0 * f1 / (f * f * f);
        p.azz = 6.0 * f1 * f1 / (f * f * f * f) - 2.0 * f2 / (f * f * f);
        p.b = sech2;
        p.by = -2.0 * sech2 * th;
        p.byy = 4.0 * sech2 * th * th - 2.0 * sech2 * sech2;
        return p;
    };
    return HamiltonianSystem(
        "diabolo2", 2,
        [parts](const PhasePoint& x) {
            const Parts p = parts(x.q(0), x.q(1));
            return x.p.squaredNorm() + p.a * p.b - 1.0;
        },
        [parts](const PhasePoint& x) -> Vec {
            const Parts p = parts(x.q(0), x.q(1));
            Vec g(4);
            g << p.a * p.by, p.az * p.b, 2 * x.p(0), 2 * x.p(1);
            return g;
        },
        [parts](const PhasePoint& x) -> Mat {
            const Parts p = parts(x.q(0), x.q(1));
            Mat hm = Mat::Zero(4, 4);
            hm(0, 0) = p.a * p.byy;
            hm(0, 1) = hm(1, 0) = p.az * p.by;
            hm(1, 1) = p.azz * p.b;
            hm(2, 2) = hm(3, 3) = 2.0;
            return hm;
        });
}

HamiltonianSystem model_system(double mu) {
    if (!(mu > 0.0)) throw ContractError("model_system: mu must be positive");
    // stacked (t, x, tau, xi)
    HamiltonianSystem sys(
        "model", 2,
        [mu](const PhasePoint& x) { return -x.p(0) + mu * x.q(1) * x.p(1); },
        [mu](const PhasePoint& x) -> Vec {
            Vec g(4);
            g << 0.0, mu * x.p(1), -1.0, mu * x.q(1);
            return g;
        },
        [mu](const PhasePoint&) -> Mat {
            Mat hm = Mat::Zero(4, 4);
            hm(1, 3) = hm(3, 1) = mu;
            return hm;
        });
    sys.set_angle_period(0, 2.0 * std::numbers::pi);
    return sys;
}

HamiltonianSystem polynomial_system(const std::string& label, int dof,
                                    const std::vector<PolynomialTerm>& h0,
                                    const std::vector<PolynomialTerm>& h1) {
    for (const auto* terms : {&h0, &h1})
        for (const auto& t : *terms) {
            if (static_cast<int>(t.powers.size()) != 2 * dof)
                throw ConfigError("polynomial term needs " + std::to_string(2 * dof) + " powers");
            for (int e : t.powers)
                if (e < 0) throw ConfigError("polynomial powers must be nonnegative");
        }
    if (h0.empty()) throw ConfigError("polynomial system needs at least one h0 term");
    const int dim = 2 * dof;
    HamiltonianSystem sys(
        label, dof,
        [h0](const PhasePoint& x) {
            const Vec s = x.stacked();
            double v = 0.0;
            for (const auto& t : h0) v += t.coef * monomial(t.powers, s);
            return v;
        },
        [h0, dim](const PhasePoint& x) -> Vec {
            const Vec s = x.stacked();
            Vec g = Vec::Zero(dim);
            for (const auto& t : h0)
                for (int i = 0; i < dim; ++i)
                    if (t.powers[i] > 0) g(i) += t.coef * monomial(t.powers, s, i);
            return g;
        },
        [h0, dim](const PhasePoint& x) -> Mat {
            const Vec s = x.stacked();
            Mat hm = Mat::Zero(dim, dim);
            for (const auto& t : h0)
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j)
                        if (t.powers[i] > 0 && t.powers[j] > 0 && (i != j || t.powers[i] > 1))
                            hm(i, j) += t.coef * monomial(t.powers, s, i, j);
            return hm;
        });
    if (!h1.empty())
        sys.set_h1([h1](const PhasePoint& x) {
            const Vec s = x.stacked();
            double v = 0.0;
            for (const auto& t : h1) v += t.coef * monomial(t.powers, s);
            return v;
        });
    return sys;
}

HamiltonianSystem builtin_system(const std::string& label, double omega, double mu) {
    if (label == "hyp2") return hyp2();
    if (label == "semihyp3") return semihyp3(omega);
    if (label == "diabolo2") return diabolo2();
    if (label == "model") return model_system(mu);
    if (label == "harmonic") return harmonic_oscillator();
    if (label == "inverted") return inverted_oscillator();
    throw ConfigError("unknown built-in system '" + label + "'");
}

std::vector<std::string> builtin_labels() {
    return {"hyp2", "semihyp3", "diabolo2", "model", "harmonic", "inverted"};
}

}  // namespace hypres
