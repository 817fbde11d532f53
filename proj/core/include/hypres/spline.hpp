#pragma once

#include <vector>

#include "hypres/linalg.hpp"

namespace hypres {

// Natural cubic spline through (x_i, y_i). Evaluation at a complex
// argument uses the polynomial piece selected by Re(z), so the
// interpolant continues analytically a short distance off the real axis.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    double derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    std::size_t piece(double x) const;

    std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

// Complex-valued data: independent splines for real and imaginary parts.
// Evaluation at complex z is the analytic continuation a(z) + i b(z).
class ComplexSpline {
public:
    ComplexSpline() = default;
    ComplexSpline(const std::vector<double>& x, const std::vector<cplx>& y);

    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    bool empty() const { return re_.empty(); }

private:
    CubicSpline re_, im_;
};

}  // namespace hypres
