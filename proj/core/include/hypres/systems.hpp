#pragma once

#include <string>
#include <vector>

#include "hypres/dynamics.hpp"

namespace hypres {

// H = 1/2 (px^2 + py^2) + 1/2 x^2 - 1/2 y^2, q = (x, y)
HamiltonianSystem hyp2();

// hyp2 + 1/2 pz^2 + 1/2 omega^2 z^2, q = (x, y, z)
HamiltonianSystem semihyp3(double omega = 1.4142135623730951);

// H = eta^2 + zeta^2 + ((2 z^4 - z^2 + 1) cosh y)^(-2) - 1, q = (y, z)
HamiltonianSystem diabolo2();

// H = -tau + mu x xi on q = (t, x), p = (tau, xi); t is 2 pi periodic.
HamiltonianSystem model_system(double mu = 1.0);

// H = 1/2 (p^2 + q^2)
HamiltonianSystem harmonic_oscillator();

// H = eta^2 - y^2
HamiltonianSystem inverted_oscillator();

// Monomial sum  sum_t c_t prod_i x_i^{e_ti}  in stacked coordinates.
struct PolynomialTerm {
    double coef = 0.0;
    std::vector<int> powers;  // length 2n
};

HamiltonianSystem polynomial_system(const std::string& label, int dof,
                                    const std::vector<PolynomialTerm>& h0,
                                    const std::vector<PolynomialTerm>& h1 = {});

// Built-ins by label: hyp2, semihyp3, diabolo2, model, harmonic, inverted.
// omega applies to semihyp3, mu to model.
HamiltonianSystem builtin_system(const std::string& label, double omega = 1.4142135623730951,
                                 double mu = 1.0);
std::vector<std::string> builtin_labels();

}  // namespace hypres
