// oracles.hpp — reference computations for the tests, built on Eigen's
// matrix exponential and plain finite differences rather than on the library.

#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using HamFn = std::function<CMatrix(const Eigen::VectorXd&)>;

inline CMatrix pauli_x() { return (CMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline CMatrix pauli_y() { return (CMatrix(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished(); }
inline CMatrix pauli_z() { return (CMatrix(2, 2) << 1, 0, 0, -1).finished(); }

inline CMatrix expm_channel(const CMatrix& h)
{
    const CMatrix a = cplx(0.0, -1.0) * h;
    return a.exp();
}

// i (d_j U) U† with a fourth-order central difference of expm.
inline CMatrix generator(const HamFn& ham, const Eigen::VectorXd& phi, int j, double h = 1e-3)
{
    auto u = [&](double t) {
        Eigen::VectorXd p = phi;
        p(j) += t;
        return expm_channel(ham(p));
    };
    const CMatrix du = (-u(2 * h) + 8.0 * u(h) - 8.0 * u(-h) + u(-2 * h)) / (12.0 * h);
    return cplx(0.0, 1.0) * du * expm_channel(ham(phi)).adjoint();
}

// Pure-state QFIM from state derivatives: 4 Re(<d_m psi|d_n psi> - <d_m psi|psi><psi|d_n psi>).
inline Eigen::MatrixXd pure_qfim(const HamFn& ham, const Eigen::VectorXd& phi, const CVector& psi0,
                                 double h = 1e-3)
{
    const int d = static_cast<int>(phi.size());
    const CVector psi = expm_channel(ham(phi)) * psi0;
    std::vector<CVector> dpsi;
    for (int j = 0; j < d; ++j) {
        auto state = [&](double t) {
            Eigen::VectorXd p = phi;
            p(j) += t;
            return CVector(expm_channel(ham(p)) * psi0);
        };
        dpsi.push_back((-state(2 * h) + 8.0 * state(h) - 8.0 * state(-h) + state(-2 * h)) / (12.0 * h));
    }
    Eigen::MatrixXd out(d, d);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            const cplx v = dpsi[m].dot(dpsi[n]) - dpsi[m].dot(psi) * psi.dot(dpsi[n]);
            out(m, n) = 4.0 * v.real();
        }
    }
    return out;
}

// Classical Fisher information of a bivariate Gaussian position measurement
// with covariance sigma^2 [[1, rho], [rho, 1]]: J^T Sigma^-1 J.
inline Eigen::MatrixXd gaussian_fisher(const Eigen::Matrix<double, 2, Eigen::Dynamic>& jac,
                                       double sigma, double rho)
{
    Eigen::Matrix2d cov;
    cov << 1.0, rho, rho, 1.0;
    cov *= sigma * sigma;
    return jac.transpose() * cov.inverse() * jac;
}

} // namespace oracle
