#include "hypres/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "hypres/errors.hpp"

namespace hypres {

PhasePoint::PhasePoint(Vec q_, Vec p_) : q(std::move(q_)), p(std::move(p_)) {
    if (q.size() != p.size() || q.size() == 0)
        throw ContractError("PhasePoint: q and p must have equal nonzero length");
}

Vec PhasePoint::stacked() const {
    Vec x(q.size() + p.size());
    x << q, p;
    return x;
}

PhasePoint PhasePoint::from_stacked(const Vec& x) {
    if (x.size() % 2 != 0 || x.size() == 0)
        throw ContractError("PhasePoint: stacked vector must have even nonzero length");
    const Eigen::Index n = x.size() / 2;
    return PhasePoint(x.head(n), x.tail(n));
}

namespace {

double fd_step(double v) { return 1e-5 * std::max(1.0, std::abs(v)); }

Vec fd_gradient(const ScalarField& f, const PhasePoint& x) {
    const Vec s = x.stacked();
    Vec g(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double hstep = fd_step(s(i));
        Vec a = s, b = s;
        a(i) += hstep;
        b(i) -= hstep;
        g(i) = (f(PhasePoint::from_stacked(a)) - f(PhasePoint::from_stacked(b))) / (2.0 * hstep);
    }
    return g;
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

HamiltonianSystem::HamiltonianSystem(std::string label, int dof, ScalarField h0,
                                     GradientField grad, HessianField hess, ScalarField h1)
    : label_(std::move(label)), dof_(dof), h0_(std::move(h0)), h1_(std::move(h1)),
      grad_(std::move(grad)), hess_(std::move(hess)), angle_period_(dof, 0.0) {
    if (dof < 1) throw ContractError("HamiltonianSystem: dof must be positive");
    if (!h0_) throw ContractError("HamiltonianSystem: h0 evaluator required");
}

double HamiltonianSystem::h0(const PhasePoint& x) const {
    if (x.dof() != dof_) throw ContractError("h0: phase point has wrong dimension");
    return h0_(x);
}

Vec HamiltonianSystem::grad_h0(const PhasePoint& x) const {
    if (x.dof() != dof_) throw ContractError("grad_h0: phase point has wrong dimension");
    return grad_ ? grad_(x) : fd_gradient(h0_, x);
}

Mat HamiltonianSystem::hess_h0(const PhasePoint& x) const {
    if (x.dof() != dof_) throw ContractError("hess_h0: phase point has wrong dimension");
    if (hess_) return hess_(x);
    const Vec s = x.stacked();
    const int dim = 2 * dof_;
    Mat hm(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double hstep = 10.0 * fd_step(s(i));
        Vec a = s, b = s;
        a(i) += hstep;
        b(i) -= hstep;
        hm.col(i) = (grad_h0(PhasePoint::from_stacked(a)) - grad_h0(PhasePoint::from_stacked(b))) /
                    (2.0 * hstep);
    }
    return 0.5 * (hm + hm.transpose());
}

double HamiltonianSystem::h1(const PhasePoint& x) const {
    if (!h1_) throw ConfigError("system '" + label_ + "' has no subprincipal symbol h1");
    return h1_(x);
}

HamiltonianSystem& HamiltonianSystem::set_h1(ScalarField h1) {
    h1_ = std::move(h1);
    return *this;
}

HamiltonianSystem& HamiltonianSystem::set_angle_period(int q_index, double period) {
    if (q_index < 0 || q_index >= dof_) throw ContractError("set_angle_period: index out of range");
    if (!(period >= 0.0)) throw ContractError("set_angle_period: period must be nonnegative");
    angle_period_[q_index] = period;
    return *this;
}

double HamiltonianSystem::angle_period(int q_index) const { return angle_period_.at(q_index); }

bool HamiltonianSystem::has_angles() const {
    return std::any_of(angle_period_.begin(), angle_period_.end(), [](double p) { return p > 0; });
}

Vec HamiltonianSystem::wrap_difference(Vec dx) const {
    for (int i = 0; i < dof_; ++i) {
        const double per = angle_period_[i];
        if (per > 0.0) dx(i) -= per * std::round(dx(i) / per);
    }
    return dx;
}

Vec hamiltonian_vector_field(const HamiltonianSystem& sys, const PhasePoint& x) {
    const Vec g = sys.grad_h0(x);
    if (!all_finite(g)) throw DomainError("non-finite gradient in system '" + sys.label() + "'");
    const int n = sys.dof();
    Vec f(2 * n);
    f.head(n) = g.tail(n);
    f.tail(n) = -g.head(n);
    return f;
}

namespace {

using State = std::vector<double>;
using Stepper = boost::numeric::odeint::runge_kutta_fehlberg78<State>;

constexpr long kMaxSteps = 20000000;

// Adaptive driver around the Fehlberg 7(8) pair. Steps are clamped to land
// exactly on each requested output time. The error norm is mixed
// absolute/relative: max_i |err_i| / max(1, |y_i|).
template <class Rhs, class Sink>
void integrate_to_times(Rhs&& rhs, State y, const std::vector<double>& times, double tol,
                        Sink&& sink) {
    if (!(tol > 0.0)) throw ContractError("flow: tol must be positive");
    Stepper stepper;
    State ynew(y.size()), err(y.size());
    double t = 0.0;
    double dt = 0.0;
    long steps = 0;
    for (double target : times) {
        if (!std::isfinite(target)) throw ContractError("flow: non-finite time");
        const double span = target - t;
        if (span == 0.0) {
            sink(y);
            continue;
        }
        const double dir = span > 0 ? 1.0 : -1.0;
        if (dt == 0.0 || dt * dir < 0) dt = dir * std::min(0.05, std::abs(span));
        while ((target - t) * dir > 0.0) {
            bool last = false;
            double step = dt;
            if ((t + step - target) * dir >= 0.0) {
                step = target - t;
                last = true;
            }
            stepper.do_step(rhs, y, t, ynew, step, err);
            double en = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (!std::isfinite(ynew[i]) || !std::isfinite(err[i])) {
                    finite = false;
                    break;
                }
                const double sc = std::max({1.0, std::abs(y[i]), std::abs(ynew[i])});
                en = std::max(en, std::abs(err[i]) / sc);
            }
            if (!finite) en = 1e300;
            const double ratio = en / tol;
            if (ratio <= 1.0) {
                t = last ? target : t + step;
                y.swap(ynew);
                const double fac = ratio > 0 ? 0.9 * std::pow(ratio, -1.0 / 8.0) : 5.0;
                // do not let a short clamped step shrink the controller's step
                if (!last || std::abs(step) >= std::abs(dt))
                    dt = step * std::clamp(fac, 0.2, 5.0);
            } else {
                const double fac = finite ? 0.9 * std::pow(ratio, -1.0 / 8.0) : 0.1;
                dt = step * std::clamp(fac, 0.1, 0.9);
            }
            if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationError("flow: step size underflow at t=" + std::to_string(t), t);
            if (++steps > kMaxSteps)
                throw IntegrationError("flow: step budget exhausted at t=" + std::to_string(t), t);
        }
        sink(y);
    }
}

void check_times(const std::vector<double>& times) {
    for (std::size_t i = 1; i < times.size(); ++i) {
        const bool fwd = times.back() >= times.front();
        if (fwd ? times[i] < times[i - 1] : times[i] > times[i - 1])
            throw ContractError("flow_samples: times must be monotone");
    }
}

struct PlainRhs {
    const HamiltonianSystem* sys;
    void operator()(const State& y, State& dy, double) const {
        const int n = sys->dof();
        Eigen::Map<const Vec> x(y.data(), 2 * n);
        const Vec f = hamiltonian_vector_field(*sys, PhasePoint::from_stacked(x));
        Eigen::Map<Vec>(dy.data(), 2 * n) = f;
    }
};

struct VariationalRhs {
    const HamiltonianSystem* sys;
    void operator()(const State& y, State& dy, double) const {
        const int n = sys->dof();
        const int dim = 2 * n;
        Eigen::Map<const Vec> x(y.data(), dim);
        const PhasePoint pt = PhasePoint::from_stacked(x);
        Eigen::Map<Vec>(dy.data(), dim) = hamiltonian_vector_field(*sys, pt);
        const Mat hs = sys->hess_h0(pt);
        if (!hs.allFinite()) throw DomainError("non-finite Hessian in system '" + sys->label() + "'");
        Mat a(dim, dim);  // Omega * Hess
        a.topRows(n) = hs.bottomRows(n);
        a.bottomRows(n) = -hs.topRows(n);
        Eigen::Map<const Mat> j(y.data() + dim, dim, dim);
        Eigen::Map<Mat>(dy.data() + dim, dim, dim) = a * j;
    }
};

}  // namespace

std::vector<PhasePoint> flow_samples(const HamiltonianSystem& sys, const PhasePoint& x0,
                                     const std::vector<double>& times, double tol) {
    if (x0.dof() != sys.dof()) throw ContractError("flow: phase point has wrong dimension");
    check_times(times);
    const Vec s = x0.stacked();
    State y(s.data(), s.data() + s.size());
    std::vector<PhasePoint> out;
    out.reserve(times.size());
    integrate_to_times(PlainRhs{&sys}, y, times, tol, [&](const State& st) {
        out.push_back(PhasePoint::from_stacked(Eigen::Map<const Vec>(st.data(), st.size())));
    });
    return out;
}

PhasePoint flow(const HamiltonianSystem& sys, const PhasePoint& x0, double t, double tol) {
    if (t == 0.0) {
        if (x0.dof() != sys.dof()) throw ContractError("flow: phase point has wrong dimension");
        if (!(tol > 0.0)) throw ContractError("flow: tol must be positive");
        return x0;
    }
    return flow_samples(sys, x0, {t}, tol).front();
}

std::vector<VariationalState> flow_samples_with_variations(const HamiltonianSystem& sys,
                                                           const PhasePoint& x0,
                                                           const std::vector<double>& times,
                                                           double tol) {
    if (x0.dof() != sys.dof()) throw ContractError("flow: phase point has wrong dimension");
    check_times(times);
    const int dim = sys.dim();
    State y(dim + dim * dim, 0.0);
    const Vec s = x0.stacked();
    std::copy(s.data(), s.data() + dim, y.begin());
    for (int i = 0; i < dim; ++i) y[dim + i * dim + i] = 1.0;
    std::vector<VariationalState> out;
    out.reserve(times.size());
    integrate_to_times(VariationalRhs{&sys}, y, times, tol, [&](const State& st) {
        VariationalState v;
        v.point = PhasePoint::from_stacked(Eigen::Map<const Vec>(st.data(), dim));
        v.jacobian = Eigen::Map<const Mat>(st.data() + dim, dim, dim);
        out.push_back(std::move(v));
    });
    return out;
}

VariationalState flow_with_variations(const HamiltonianSystem& sys, const PhasePoint& x0, double t,
                                      double tol) {
    return flow_samples_with_variations(sys, x0, {t}, tol).front();
}

double poisson_bracket(const HamiltonianSystem& sys, const ScalarField& g, const PhasePoint& x) {
    return fd_gradient(g, x).dot(hamiltonian_vector_field(sys, x));
}

EscapeReport check_escape_function(const HamiltonianSystem& sys, const ScalarField& g,
                                   const SamplingRegion& region, int samples, double c,
                                   std::uint64_t seed) {
    if (samples < 1) throw ContractError("check_escape_function: samples must be positive");
    const int dim = sys.dim();
    if (region.lower.size() != dim || region.upper.size() != dim)
        throw ContractError("check_escape_function: bounding box has wrong dimension");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    EscapeReport rep;
    rep.min_bracket = std::numeric_limits<double>::infinity();
    const long max_draws = 1000L * samples;
    for (long draw = 0; draw < max_draws && rep.accepted < samples; ++draw) {
        Vec s(dim);
        for (int i = 0; i < dim; ++i)
            s(i) = region.lower(i) + (region.upper(i) - region.lower(i)) * unit(rng);
        const PhasePoint x = PhasePoint::from_stacked(s);
        if (region.contains && !region.contains(x)) continue;
        ++rep.accepted;
        const double b = poisson_bracket(sys, g, x);
        if (b < rep.min_bracket) {
            rep.min_bracket = b;
            rep.argmin = x;
        }
    }
    if (rep.accepted == 0) throw EmptyRegionError("check_escape_function: no sample fell in region");
    rep.pass = rep.min_bracket >= c;
    return rep;
}

double gradient_consistency_error(const HamiltonianSystem& sys, const Vec& lower, const Vec& upper,
                                  int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int dim = sys.dim();
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        Vec s(dim);
        for (int i = 0; i < dim; ++i) s(i) = lower(i) + (upper(i) - lower(i)) * unit(rng);
        const PhasePoint x = PhasePoint::from_stacked(s);
        const Vec g = sys.grad_h0(x);
        const Vec fd = fd_gradient([&](const PhasePoint& y) { return sys.h0(y); }, x);
        const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-3);
        worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / scale);
    }
    return worst;
}

}  // namespace hypres
