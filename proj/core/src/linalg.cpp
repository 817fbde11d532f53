#include "hypres/linalg.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include <lapacke.h>

#include "hypres/errors.hpp"

namespace hypres {

Mat symplectic_form(int dim) {
    if (dim % 2 != 0) throw ContractError("symplectic_form: odd dimension " + std::to_string(dim));
    const int n = dim / 2;
    Mat om = Mat::Zero(dim, dim);
    om.topRightCorner(n, n).setIdentity();
    om.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return om;
}

double symplectic_defect(const Mat& m) {
    const Mat om = symplectic_form(static_cast<int>(m.rows()));
    return (m.transpose() * om * m - om).cwiseAbs().maxCoeff();
}

CVec eigenvalues(const Mat& a) {
    if (a.rows() != a.cols()) throw ContractError("eigenvalues: matrix not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (n == 0) return CVec();
    Mat work = a;  // column major copy, destroyed by dgeev
    std::vector<double> wr(n), wi(n);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(),
                                          wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0)
        throw NumericalError("dgeev failed, info=" + std::to_string(info) +
                             " (n=" + std::to_string(n) + ")");
    CVec out(n);
    for (lapack_int i = 0; i < n; ++i) out(i) = cplx(wr[i], wi[i]);
    return out;
}

CVec eigenvalues(const CMat& a) {
    if (a.rows() != a.cols()) throw ContractError("eigenvalues: matrix not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (n == 0) return CVec();
    CMat work = a;
    CVec w(n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
        reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
    if (info != 0)
        throw NumericalError("zgeev failed, info=" + std::to_string(info) +
                             " (n=" + std::to_string(n) + ")");
    return w;
}

void sort_by_real(CVec& v) {
    std::sort(v.data(), v.data() + v.size(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

}  // namespace hypres
