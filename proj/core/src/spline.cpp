#include "hypres/spline.hpp"

#include <algorithm>
#include <cmath>

#include "hypres/errors.hpp"

namespace hypres {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size()) throw ArityError("spline: knot/value count mismatch");
    if (n < 2) throw ArityError("spline: need at least two knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw ContractError("spline: knots must be strictly increasing");

    // natural end conditions, tridiagonal solve (Thomas)
    m_.assign(n, 0.0);
    if (n == 2) return;
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        a[i] = h0 / 6.0;
        b[i] = (h0 + h1) / 3.0;
        c[i] = h1 / 6.0;
        r[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
}

std::size_t CubicSpline::piece(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

cplx CubicSpline::operator()(cplx z) const {
    const std::size_t i = piece(z.real());
    const double hi = x_[i + 1] - x_[i];
    const cplx A = (x_[i + 1] - z) / hi;
    const cplx B = (z - x_[i]) / hi;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * (hi * hi / 6.0);
}

double CubicSpline::operator()(double x) const { return (*this)(cplx(x, 0.0)).real(); }

cplx CubicSpline::derivative(cplx z) const {
    const std::size_t i = piece(z.real());
    const double hi = x_[i + 1] - x_[i];
    const cplx A = (x_[i + 1] - z) / hi;
    const cplx B = (z - x_[i]) / hi;
    return (y_[i + 1] - y_[i]) / hi +
           (-(3.0 * A * A - 1.0) * m_[i] + (3.0 * B * B - 1.0) * m_[i + 1]) * (hi / 6.0);
}

double CubicSpline::derivative(double x) const { return derivative(cplx(x, 0.0)).real(); }

ComplexSpline::ComplexSpline(const std::vector<double>& x, const std::vector<cplx>& y) {
    std::vector<double> re(y.size()), im(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        re[i] = y[i].real();
        im[i] = y[i].imag();
    }
    re_ = CubicSpline(x, re);
    im_ = CubicSpline(x, im);
}

cplx ComplexSpline::operator()(cplx z) const { return re_(z) + cplx(0.0, 1.0) * im_(z); }

cplx ComplexSpline::derivative(cplx z) const {
    return re_.derivative(z) + cplx(0.0, 1.0) * im_.derivative(z);
}

}  // namespace hypres
