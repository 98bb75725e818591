// generator.hpp — local generators of parameter translations
//
// For a channel U(phi) = exp(-i H(phi)) the generator in phi_j is
//     G_j = i (d_j U) U†  =  ∫_0^1 exp(-i a H) (d_j H) exp(i a H) da.
// Four routes are provided. generator_spectral is the production path; the
// quadrature, nested-commutator and finite-difference routes exist to
// cross-check it.

#pragma once

#include "gridqfi/spectral.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gridqfi {

using ParamVector = Eigen::VectorXd;

// A D-parameter family of Hamiltonians phi -> H(phi), optionally with
// analytic partial derivatives. Without them derivative_at falls back to
// central differences.
struct ParamHamiltonianFamily {
    using HamiltonianFn = std::function<HermitianOperator(const ParamVector&)>;
    using DerivativeFn = std::function<HermitianOperator(const ParamVector&, int)>;

    Eigen::Index dim{0};
    int n_params{0};
    HamiltonianFn hamiltonian;
    DerivativeFn derivative; // may be empty

    HermitianOperator hamiltonian_at(const ParamVector& phi) const;

    // Analytic derivative if supplied; otherwise a central difference with
    // step 1e-6 * max(1, |phi_j|), checked against the half step.
    HermitianOperator derivative_at(const ParamVector& phi, int j) const;

    void check_point(const ParamVector& phi) const;
};

// H(phi) = H0 + sum_j phi_j H_j. Every generator equals H_j.
ParamHamiltonianFamily make_linear_family(std::vector<HermitianOperator> terms,
                                          std::optional<HermitianOperator> offset = std::nullopt);

// H(phi) = sum_k E_k(phi) |k><k| in the computational basis.
ParamHamiltonianFamily make_diagonal_family(
    Eigen::Index dim, int n_params,
    std::function<Eigen::VectorXd(const ParamVector&)> energies,
    std::function<Eigen::VectorXd(const ParamVector&, int)> energy_gradient);

struct GeneratorSet {
    std::vector<HermitianOperator> generators;
    // Route diagnostics, one entry per parameter where the route reports them.
    std::vector<double> antihermitian_residual;
    std::vector<int> series_order;

    std::size_t size() const noexcept { return generators.size(); }
    const HermitianOperator& operator[](std::size_t j) const { return generators.at(j); }
};

inline constexpr int kDefaultQuadratureNodes = 32;
inline constexpr int kDefaultSeriesMaxOrder = 40;
inline constexpr double kDefaultSeriesTol = 1e-12;

// exp(-i H(phi)) through the spectral decomposition.
CMatrix channel_unitary(const ParamHamiltonianFamily& family, const ParamVector& phi);

// Gauge-free closed form in the eigenbasis of H:
//     (G_j)_ab = <a|d_j H|b> * exp(-i D/2) sin(D/2)/(D/2),  D = E_a - E_b,
// with the factor set to 1 inside a degeneracy cluster.
GeneratorSet generator_spectral(const ParamHamiltonianFamily& family, const ParamVector& phi,
                                double cluster_tol = kDefaultClusterTol);

// Same generator from a decomposition the caller already holds.
HermitianOperator generator_from_decomposition(const SpectralDecomposition& decomp,
                                               const HermitianOperator& dh);

// Gauss–Legendre quadrature of the Duhamel integral.
GeneratorSet generator_duhamel(const ParamHamiltonianFamily& family, const ParamVector& phi,
                               int n_nodes = kDefaultQuadratureNodes);

struct CommutatorSeries {
    CMatrix sum;
    int order{0};                  // highest order whose term exceeded the tolerance
    std::vector<double> term_norms; // max-norm of each summed term, order 0 upward
};

// sum_n (-i)^n / (n+1)! ad_H^n(dh), stopped at the first term with max-norm
// below term_tol. Throws NumericalError if max_order is reached first.
CommutatorSeries nested_commutator_series(const CMatrix& h, const CMatrix& dh, int max_order,
                                          double term_tol);

GeneratorSet generator_bch(const ParamHamiltonianFamily& family, const ParamVector& phi,
                           int max_order = kDefaultSeriesMaxOrder,
                           double term_tol = kDefaultSeriesTol);

// i (d_j U) U† with d_j U by central differences of channel_unitary.
// A non-positive h selects 1e-5 * max(1, |phi_j|).
GeneratorSet generator_fd(const ParamHamiltonianFamily& family, const ParamVector& phi,
                          double h = 0.0);

} // namespace gridqfi
