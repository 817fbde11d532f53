#pragma once

#include <complex>

#include <Eigen/Dense>

namespace hypres {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Standard symplectic form [[0, I], [-I, 0]] on R^dim, dim even.
Mat symplectic_form(int dim);

// max-abs entry of M^T Omega M - Omega
double symplectic_defect(const Mat& m);

// Eigenvalues of a general square matrix (LAPACK ?geev, balanced).
// Throws NumericalError if the QR iteration fails.
CVec eigenvalues(const Mat& a);
CVec eigenvalues(const CMat& a);

// Sort by real part, then imaginary part.
void sort_by_real(CVec& v);

}  // namespace hypres
