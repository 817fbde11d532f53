#include "hypres/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace hypres {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

CVec transform(const CVec& f, int sign) {
    const int n = static_cast<int>(f.size());
    CVec out(n);
    if (n == 0) return out;
    CVec in = f;  // FFTW_ESTIMATE does not touch the input, but plans want non-const
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, pin, pout, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

CVec fft(const CVec& f) { return transform(f, FFTW_FORWARD); }

CVec ifft(const CVec& f) {
    CVec out = transform(f, FFTW_BACKWARD);
    if (f.size() > 0) out /= static_cast<double>(f.size());
    return out;
}

Vec wavenumbers(int n, bool zero_nyquist) {
    Vec k(n);
    for (int j = 0; j < n; ++j) k(j) = (j <= n / 2) ? j : j - n;
    if (zero_nyquist && n % 2 == 0) k(n / 2) = 0.0;
    return k;
}

CVec spectral_derivative(const CVec& f, double period) {
    const int n = static_cast<int>(f.size());
    CVec fh = fft(f);
    const Vec k = wavenumbers(n, true);
    const double scale = 2.0 * std::numbers::pi / period;
    for (int j = 0; j < n; ++j) fh(j) *= cplx(0.0, scale * k(j));
    return ifft(fh);
}

Vec spectral_derivative(const Vec& f, double period) {
    return spectral_derivative(CVec(f.cast<cplx>()), period).real();
}

}  // namespace hypres
