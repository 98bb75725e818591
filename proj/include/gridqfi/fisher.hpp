// fisher.hpp — quantum and classical Fisher information, symmetric logarithmic
// derivatives, the saturability diagnostic and weighted Cramér–Rao bounds.

#pragma once

#include "gridqfi/generator.hpp"
#include "gridqfi/spectral.hpp"

#include <Eigen/Dense>

#include <span>
#include <variant>
#include <vector>

namespace gridqfi {

inline constexpr double kDefaultSupportTol = 1e-12;

// A normalized state vector.
class PureState {
public:
    explicit PureState(CVector amplitudes);
    const CVector& amplitudes() const noexcept { return amplitudes_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }

private:
    CVector amplitudes_;
};

// rho = sum_j p_j |v_j><v_j| with orthonormal columns v_j (possibly fewer
// columns than the Hilbert-space dimension).
class MixedState {
public:
    MixedState(Eigen::VectorXd weights, CMatrix eigenvectors);
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    const CMatrix& eigenvectors() const noexcept { return eigenvectors_; }
    Eigen::Index dim() const noexcept { return eigenvectors_.rows(); }
    CMatrix density() const;

private:
    Eigen::VectorXd weights_;
    CMatrix eigenvectors_;
};

using QuantumState = std::variant<PureState, MixedState>;

Eigen::Index state_dim(const QuantumState& state);
CMatrix density_matrix(const QuantumState& state);
// U rho U† in the same representation.
QuantumState evolve(const QuantumState& state, const CMatrix& unitary);

enum class InfoKind { Quantum, Classical };

struct InfoMatrix {
    Eigen::MatrixXd entries;
    InfoKind kind{InfoKind::Quantum};

    Eigen::Index size() const noexcept { return entries.rows(); }
    double operator()(Eigen::Index m, Eigen::Index n) const { return entries(m, n); }
    double min_eigenvalue() const;
};

// Symmetric positive-definite weighting of parameter variances.
class CostMatrix {
public:
    explicit CostMatrix(Eigen::MatrixXd entries);
    static CostMatrix identity(Eigen::Index d);
    const Eigen::MatrixXd& matrix() const noexcept { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

// 4 Re(<G_m G_n> - <G_m><G_n>).
InfoMatrix qfim_pure(const PureState& psi, const GeneratorSet& gens);

// Mixed-state QFIM over the support {j : p_j > support_tol}.
InfoMatrix qfim_mixed(const MixedState& rho, const GeneratorSet& gens,
                      double support_tol = kDefaultSupportTol);

InfoMatrix qfim(const QuantumState& state, const GeneratorSet& gens,
                double support_tol = kDefaultSupportTol);

// Symmetric logarithmic derivative L_j for d_j rho = -i [G_j, rho], in the
// computational basis. Elements between two kernel vectors are 0.
HermitianOperator sld(const QuantumState& state, const GeneratorSet& gens, std::size_t j,
                      double support_tol = kDefaultSupportTol);

std::vector<HermitianOperator> slds(const QuantumState& state, const GeneratorSet& gens,
                                    double support_tol = kDefaultSupportTol);

// d_j rho = -i [G_j, rho].
CMatrix state_derivative(const QuantumState& state, const HermitianOperator& generator);

// Im Tr(rho [L_j, L_k]) for every pair; all zero means the multiparameter
// quantum bound is asymptotically attainable.
Eigen::MatrixXd saturability(const QuantumState& state, std::span<const HermitianOperator> slds);

// Tr(R I^{-1}) / repetitions. Throws SingularInformationError naming the
// unresolvable direction if min eig(I) <= 1e-12 * trace(I) / D.
double qcrb_scalar(const InfoMatrix& info, const CostMatrix& cost, int repetitions = 1);

// Classical Fisher information of a sampled density p(x|phi) with spacing dx:
// sum_x dx (d_m p)(d_n p) / p over points with p >= 1e-12.
InfoMatrix cfim_numeric(std::span<const double> prob,
                        std::span<const std::vector<double>> dprob, double dx);

// Fidelity finite-difference oracle: 8 (1 - F) / delta^2 with F the root
// fidelity between U(phi) rho0 U(phi)† and the state displaced by delta along
// a direction, symmetrized over +/- delta; off-diagonals by polarization.
InfoMatrix qfi_fidelity_oracle(const ParamHamiltonianFamily& family, const QuantumState& rho0,
                               const ParamVector& phi, double delta = 1e-4);

// Root fidelity Tr|sqrt(rho) sqrt(sigma)| of two states sharing weights.
double root_fidelity(const QuantumState& a, const QuantumState& b);

} // namespace gridqfi
