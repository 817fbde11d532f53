#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypres/bs.hpp"
#include "hypres/floquet.hpp"

namespace hypres {

struct ModelSpec {
    int d = 1;
    std::vector<cplx> mu_rates;  // per unit time, period 2 pi
    std::vector<ExponentType> types;
    double h = 0.01;

    void validate() const;
    static ModelSpec hyperbolic(double mu, double h);
};

using MultiIndex = std::vector<int>;

struct MonomialState {
    std::map<MultiIndex, cplx> coefficients;
};

// Quadratic form in the variables (x_1, xi_1, ...) of one block, stored as
// monomial -> coefficient with exponent layout [x1, xi1, x2, xi2].
struct QuadraticSymbol {
    ExponentType type;
    cplx mu;
    double c = 0.0;
    double d = 0.0;
    std::map<std::vector<int>, cplx> terms;
    std::string text;
};

QuadraticSymbol quadratic_symbol(ExponentType type, cplx mu);

// Cutoff entering the monodromy amplitude; only chi(2 pi) - chi(0) enters.
struct TimeCutoff {
    double start_value = 0.0;
    double end_value = 1.0;
};
TimeCutoff time_cutoff(double center, double width);

// exp(-2 i pi E / h) prod_j exp((2 k_j + 1) pi mu_j)
cplx monodromy_factor(const ModelSpec& spec, cplx e, const MultiIndex& k);

MonomialState monodromy_apply(const ModelSpec& spec, cplx e, const MonomialState& state,
                              const TimeCutoff& chi = {});

ResonanceLattice model_resonances(const ModelSpec& spec, const SpectralWindow& window);

cplx truncated_monodromy_determinant(const ModelSpec& spec, cplx z, int k_max);
cplx truncated_monodromy_determinant_derivative(const ModelSpec& spec, cplx z, int k_max);

// Newton on the truncated determinant; throws NoConvergence.
cplx locate_determinant_zero(const ModelSpec& spec, cplx z_guess, int k_max, double tol);

// SemiclassicalAction of the classical model system in closed form.
SemiclassicalAction model_action(const ModelSpec& spec, double e_min = -1.0, double e_max = 1.0,
                                 int knots = 21);

}  // namespace hypres
