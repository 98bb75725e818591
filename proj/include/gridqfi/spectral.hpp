// spectral.hpp — dense Hermitian operators, eigendecomposition with degeneracy
// clustering, spectral projectors and matrix functions.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace gridqfi {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDefaultClusterTol = 1e-9;

// Largest |m(a,b) - conj(m(b,a))| over all entries.
double hermitian_defect(const CMatrix& m);

// Largest absolute entry.
double max_abs(const CMatrix& m);

// A square complex matrix equal to its conjugate transpose.
class HermitianOperator {
public:
    // Throws ValidationError if `entries` is empty, non-square, or if its
    // Hermitian defect exceeds `tol` (the message names the defect).
    explicit HermitianOperator(CMatrix entries, double tol = kHermitianTol);

    // (m + m†)/2. Never throws on asymmetry; used for outputs of routes whose
    // anti-Hermitian part is numerical noise by construction.
    static HermitianOperator hermitian_part(const CMatrix& m);

    static HermitianOperator zero(Eigen::Index dim);
    static HermitianOperator diagonal(const Eigen::VectorXd& d);

    Eigen::Index dim() const noexcept { return entries_.rows(); }
    const CMatrix& matrix() const noexcept { return entries_; }

private:
    struct Trusted {};
    HermitianOperator(CMatrix entries, Trusted) : entries_(std::move(entries)) {}

    CMatrix entries_;
};

// A maximal run of (ascending) eigenvalue indices [first, first + size).
struct Cluster {
    Eigen::Index first{0};
    Eigen::Index size{0};
};

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    CMatrix eigenvectors;          // orthonormal columns
    std::vector<Cluster> clusters; // contiguous, covering 0..dim-1
    // cluster_of[a] is the index into `clusters` holding eigenvalue a.
    std::vector<std::size_t> cluster_of;

    Eigen::Index dim() const noexcept { return eigenvalues.size(); }
    double spectral_range() const;
};

// Eigendecomposition of H. Clusters are formed by chaining adjacent gaps below
// cluster_tol * max(1, spectral range).
SpectralDecomposition decompose(const HermitianOperator& h, double cluster_tol = kDefaultClusterTol);

// Sum of |v><v| over the eigenvectors of cluster `cluster_index`.
HermitianOperator projector(const SpectralDecomposition& decomp, std::size_t cluster_index);

// V f(lambda) V†.
CMatrix apply_function(const SpectralDecomposition& decomp,
                       const std::function<cplx(double)>& f);

// exp(-i t H) from a precomputed decomposition of H.
CMatrix evolution(const SpectralDecomposition& decomp, double t = 1.0);

} // namespace gridqfi
