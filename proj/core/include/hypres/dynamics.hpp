#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypres/linalg.hpp"

namespace hypres {

struct PhasePoint {
    Vec q;
    Vec p;

    PhasePoint() = default;
    PhasePoint(Vec q_, Vec p_);

    int dof() const { return static_cast<int>(q.size()); }
    // (q_1..q_n, p_1..p_n)
    Vec stacked() const;
    static PhasePoint from_stacked(const Vec& x);
};

using ScalarField = std::function<double(const PhasePoint&)>;
using GradientField = std::function<Vec(const PhasePoint&)>;
using HessianField = std::function<Mat(const PhasePoint&)>;

class HamiltonianSystem {
public:
    HamiltonianSystem() = default;
    // grad / hess may be empty; finite differences are used then.
    HamiltonianSystem(std::string label, int dof, ScalarField h0, GradientField grad = {},
                      HessianField hess = {}, ScalarField h1 = {});

    const std::string& label() const { return label_; }
    int dof() const { return dof_; }
    int dim() const { return 2 * dof_; }

    double h0(const PhasePoint& x) const;
    Vec grad_h0(const PhasePoint& x) const;
    Mat hess_h0(const PhasePoint& x) const;

    bool has_h1() const { return static_cast<bool>(h1_); }
    double h1(const PhasePoint& x) const;

    // Positions q_i that live on a circle of the given period. Closing
    // conditions for orbits compare such coordinates modulo the period.
    HamiltonianSystem& set_angle_period(int q_index, double period);
    double angle_period(int q_index) const;
    bool has_angles() const;
    // Reduce angle components of a stacked displacement to (-P/2, P/2].
    Vec wrap_difference(Vec dx) const;

    HamiltonianSystem& set_h1(ScalarField h1);

private:
    std::string label_;
    int dof_ = 0;
    ScalarField h0_, h1_;
    GradientField grad_;
    HessianField hess_;
    std::vector<double> angle_period_;
};

struct VariationalState {
    PhasePoint point;
    Mat jacobian;
};

// (dH/dp, -dH/dq) stacked as (qdot, pdot).
Vec hamiltonian_vector_field(const HamiltonianSystem& sys, const PhasePoint& x);

PhasePoint flow(const HamiltonianSystem& sys, const PhasePoint& x0, double t, double tol);

VariationalState flow_with_variations(const HamiltonianSystem& sys, const PhasePoint& x0,
                                      double t, double tol);

// Points Phi^{t_i}(x0) for a sorted list of times (all of one sign),
// integrated in a single sweep.
std::vector<PhasePoint> flow_samples(const HamiltonianSystem& sys, const PhasePoint& x0,
                                     const std::vector<double>& times, double tol);

// Same for the variational system.
std::vector<VariationalState> flow_samples_with_variations(const HamiltonianSystem& sys,
                                                           const PhasePoint& x0,
                                                           const std::vector<double>& times,
                                                           double tol);

// {H0, g} = dH/dp . dg/dq - dH/dq . dg/dp, i.e. the derivative of g along X_H.
double poisson_bracket(const HamiltonianSystem& sys, const ScalarField& g, const PhasePoint& x);

struct SamplingRegion {
    Vec lower;  // bounding box in stacked coordinates
    Vec upper;
    std::function<bool(const PhasePoint&)> contains;
};

struct EscapeReport {
    double min_bracket = 0.0;
    bool pass = false;
    int accepted = 0;
    PhasePoint argmin;
};

EscapeReport check_escape_function(const HamiltonianSystem& sys, const ScalarField& g,
                                   const SamplingRegion& region, int samples, double c,
                                   std::uint64_t seed = 12345);

// Worst relative discrepancy between grad_h0 and central differences of h0
// over random points in the box.
double gradient_consistency_error(const HamiltonianSystem& sys, const Vec& lower,
                                  const Vec& upper, int points, std::uint64_t seed = 7);

}  // namespace hypres
