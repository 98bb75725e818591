// random_family.cpp

#include "gridqfi/random_family.hpp"

#include "gridqfi/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gridqfi {

namespace {

constexpr double kOffsetNorm = 1.0;
constexpr double kTermNorm = 0.3;

CMatrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = cplx(re, im);
        }
    }
    return m;
}

HermitianOperator rotated_diagonal(Rng& rng, const CMatrix& basis, double norm)
{
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::VectorXd d(basis.cols());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = uniform(rng);
    const double top = d.cwiseAbs().maxCoeff();
    if (top > 0.0) d *= norm / top;
    return HermitianOperator::hermitian_part(basis * d.cast<cplx>().asDiagonal() * basis.adjoint());
}

} // namespace

HermitianOperator random_hermitian(Rng& rng, Eigen::Index dim, double norm)
{
    const CMatrix g = gaussian_matrix(rng, dim, dim);
    CMatrix h = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    const double top = solver.eigenvalues().cwiseAbs().maxCoeff();
    if (top > 0.0) h *= norm / top;
    return HermitianOperator::hermitian_part(h);
}

CMatrix random_unitary(Rng& rng, Eigen::Index dim)
{
    const CMatrix g = gaussian_matrix(rng, dim, dim);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < dim; ++c) {
        const cplx d = r(c, c);
        if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
    }
    return q;
}

ParamHamiltonianFamily random_family(Rng& rng, Eigen::Index dim, int n_params, bool commuting)
{
    if (dim < 1 || n_params < 1) {
        throw ValidationError("random_family: dim and n_params must be positive");
    }
    const CMatrix basis = random_unitary(rng, dim);
    auto draw = [&](double norm) {
        return commuting ? rotated_diagonal(rng, basis, norm) : random_hermitian(rng, dim, norm);
    };
    const CMatrix offset = draw(kOffsetNorm).matrix();
    std::vector<CMatrix> quad;
    std::vector<CMatrix> trig;
    for (int j = 0; j < n_params; ++j) {
        quad.push_back(draw(kTermNorm).matrix());
        trig.push_back(draw(kTermNorm).matrix());
    }

    ParamHamiltonianFamily family;
    family.dim = dim;
    family.n_params = n_params;
    family.hamiltonian = [offset, quad, trig](const ParamVector& phi) {
        CMatrix h = offset;
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const double p = phi(static_cast<Eigen::Index>(j));
            h += (p + 0.5 * p * p) * quad[j] + std::sin(p) * trig[j];
        }
        return HermitianOperator::hermitian_part(h);
    };
    family.derivative = [quad, trig](const ParamVector& phi, int j) {
        const double p = phi(j);
        const auto k = static_cast<std::size_t>(j);
        return HermitianOperator::hermitian_part((1.0 + p) * quad[k] + std::cos(p) * trig[k]);
    };
    return family;
}

ParamVector random_point(Rng& rng, int n_params)
{
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    ParamVector phi(n_params);
    for (int j = 0; j < n_params; ++j) phi(j) = uniform(rng);
    return phi;
}

PureState random_pure_state(Rng& rng, Eigen::Index dim)
{
    CVector v = gaussian_matrix(rng, dim, 1).col(0);
    v.normalize();
    return PureState(std::move(v));
}

MixedState random_mixed_state(Rng& rng, Eigen::Index dim, Eigen::Index rank)
{
    if (rank < 1 || rank > dim) throw ValidationError("random_mixed_state: rank out of range");
    std::uniform_real_distribution<double> uniform(0.2, 1.0);
    Eigen::VectorXd w(rank);
    for (Eigen::Index i = 0; i < rank; ++i) w(i) = uniform(rng);
    w /= w.sum();
    const CMatrix u = random_unitary(rng, dim);
    return MixedState(std::move(w), u.leftCols(rank));
}

} // namespace gridqfi
