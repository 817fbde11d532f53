#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypres/dynamics.hpp"

namespace hypres {

struct OrbitSample {
    double time = 0.0;
    PhasePoint point;
};

struct PeriodicOrbit {
    std::string sys_label;
    PhasePoint x0;
    double period = 0.0;
    double energy = 0.0;
    double residual = 0.0;
    // N+1 equispaced samples, the last one at t = period
    std::vector<OrbitSample> samples;
    // angle periods of the q coordinates (0 for ordinary coordinates)
    std::vector<double> angle_periods;
};

struct OrbitFamily {
    std::vector<PeriodicOrbit> orbits;
    Vec energies;
    Vec periods;
    Vec actions;
    // set when continuation stopped early
    std::optional<std::string> failure;
};

struct ShootingOptions {
    double tol = 1e-10;
    int max_iter = 40;
    int samples = 256;
    // 0 selects a tolerance tied to tol
    double integration_tol = 0.0;
};

PeriodicOrbit find_periodic_orbit(const HamiltonianSystem& sys, const PhasePoint& guess,
                                  double guess_period, double tol, int max_iter,
                                  int samples = 256);
PeriodicOrbit find_periodic_orbit(const HamiltonianSystem& sys, const PhasePoint& guess,
                                  double guess_period, const ShootingOptions& opt);

OrbitFamily continue_family(const HamiltonianSystem& sys, const PeriodicOrbit& seed, double e_min,
                            double e_max, int steps, const ShootingOptions& opt = {});

// Closed-loop integral of p.dq along the flow direction.
double action_S0(const PeriodicOrbit& orbit);

struct DerivativeReport {
    double max_rel_err = 0.0;
};

DerivativeReport action_derivative_check(const OrbitFamily& family);

// -int_0^T H1 dt
double subprincipal_integral(const PeriodicOrbit& orbit, const HamiltonianSystem& sys);

// Samples an orbit from x0 over one period.
std::vector<OrbitSample> sample_orbit(const HamiltonianSystem& sys, const PhasePoint& x0,
                                      double period, int samples, double tol);

}  // namespace hypres
