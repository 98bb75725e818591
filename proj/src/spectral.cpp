// spectral.cpp — Hermitian eigendecomposition and spectral calculus

#include "gridqfi/spectral.hpp"

#include "gridqfi/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace gridqfi {

double hermitian_defect(const CMatrix& m)
{
    if (m.rows() != m.cols()) {
        throw ValidationError("hermitian_defect: matrix must be square");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const CMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(CMatrix entries, double tol)
    : entries_(std::move(entries))
{
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw ValidationError("HermitianOperator: matrix must be square with dim >= 1");
    }
    const double defect = hermitian_defect(entries_);
    if (!(defect <= tol)) {
        std::ostringstream msg;
        msg << "HermitianOperator: matrix is not Hermitian, max asymmetry " << defect
            << " exceeds tolerance " << tol;
        throw ValidationError(msg.str());
    }
}

HermitianOperator HermitianOperator::hermitian_part(const CMatrix& m)
{
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw ValidationError("hermitian_part: matrix must be square with dim >= 1");
    }
    CMatrix h = 0.5 * (m + m.adjoint());
    return HermitianOperator(std::move(h), Trusted{});
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim)
{
    if (dim < 1) {
        throw ValidationError("HermitianOperator::zero: dim must be >= 1");
    }
    return HermitianOperator(CMatrix::Zero(dim, dim), Trusted{});
}

HermitianOperator HermitianOperator::diagonal(const Eigen::VectorXd& d)
{
    if (d.size() < 1) {
        throw ValidationError("HermitianOperator::diagonal: dim must be >= 1");
    }
    CMatrix m = d.cast<cplx>().asDiagonal();
    return HermitianOperator(std::move(m), Trusted{});
}

double SpectralDecomposition::spectral_range() const
{
    if (eigenvalues.size() == 0) return 0.0;
    return eigenvalues(eigenvalues.size() - 1) - eigenvalues(0);
}

namespace {

bool is_diagonal(const CMatrix& m)
{
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (r != c && m(r, c) != cplx(0.0, 0.0)) return false;
        }
    }
    return true;
}

// Diagonal input: sort the (real) diagonal and permute unit vectors. Stable
// sort keeps ties in index order so the result is deterministic.
void decompose_diagonal(const CMatrix& m, SpectralDecomposition& out)
{
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return m(a, a).real() < m(b, b).real();
    });
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = m(src, src).real();
        out.eigenvectors(src, k) = 1.0;
    }
}

} // namespace

SpectralDecomposition decompose(const HermitianOperator& h, double cluster_tol)
{
    if (!(cluster_tol > 0.0)) {
        throw ValidationError("decompose: cluster_tol must be positive");
    }
    const CMatrix& m = h.matrix();
    SpectralDecomposition out;

    if (is_diagonal(m)) {
        decompose_diagonal(m, out);
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("decompose: Hermitian eigensolver did not converge");
        }
        out.eigenvalues = solver.eigenvalues();
        out.eigenvectors = solver.eigenvectors();
    }

    const Eigen::Index n = out.eigenvalues.size();
    const double threshold = cluster_tol * std::max(1.0, out.spectral_range());
    out.cluster_of.assign(static_cast<std::size_t>(n), 0);
    Cluster current{0, 1};
    for (Eigen::Index a = 1; a < n; ++a) {
        if (out.eigenvalues(a) - out.eigenvalues(a - 1) < threshold) {
            ++current.size;
        } else {
            out.clusters.push_back(current);
            current = Cluster{a, 1};
        }
        out.cluster_of[static_cast<std::size_t>(a)] = out.clusters.size();
    }
    out.clusters.push_back(current);
    return out;
}

HermitianOperator projector(const SpectralDecomposition& decomp, std::size_t cluster_index)
{
    if (cluster_index >= decomp.clusters.size()) {
        std::ostringstream msg;
        msg << "projector: cluster index " << cluster_index << " out of range (have "
            << decomp.clusters.size() << " clusters)";
        throw ValidationError(msg.str());
    }
    const Cluster& c = decomp.clusters[cluster_index];
    const auto block = decomp.eigenvectors.middleCols(c.first, c.size);
    return HermitianOperator::hermitian_part(block * block.adjoint());
}

CMatrix apply_function(const SpectralDecomposition& decomp,
                       const std::function<cplx(double)>& f)
{
    CVector values(decomp.dim());
    for (Eigen::Index a = 0; a < decomp.dim(); ++a) values(a) = f(decomp.eigenvalues(a));
    return decomp.eigenvectors * values.asDiagonal() * decomp.eigenvectors.adjoint();
}

CMatrix evolution(const SpectralDecomposition& decomp, double t)
{
    return apply_function(decomp, [t](double e) { return std::exp(cplx(0.0, -t * e)); });
}

} // namespace gridqfi
