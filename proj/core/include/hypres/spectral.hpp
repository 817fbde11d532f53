#pragma once

#include "hypres/linalg.hpp"

namespace hypres {

// Unnormalized forward DFT: F_k = sum_j f_j exp(-2 pi i jk/n).
CVec fft(const CVec& f);
// Inverse of fft (includes the 1/n).
CVec ifft(const CVec& f);

// Integer wavenumbers matching the fft output ordering (Nyquist set to 0
// for odd derivatives).
Vec wavenumbers(int n, bool zero_nyquist);

// Derivative of a periodic function sampled at n equispaced points on
// [0, period).
CVec spectral_derivative(const CVec& f, double period);
Vec spectral_derivative(const Vec& f, double period);

}  // namespace hypres
