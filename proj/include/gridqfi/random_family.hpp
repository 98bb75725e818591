// random_family.hpp — seeded random Hamiltonian families and states for the
// cross-validation suites

#pragma once

#include "gridqfi/fisher.hpp"
#include "gridqfi/generator.hpp"

#include <random>

namespace gridqfi {

using Rng = std::mt19937_64;

// Random Hermitian matrix rescaled to spectral norm `norm`.
HermitianOperator random_hermitian(Rng& rng, Eigen::Index dim, double norm = 1.0);

// Haar-ish random unitary (QR of a complex Gaussian matrix, phases fixed).
CMatrix random_unitary(Rng& rng, Eigen::Index dim);

// H(phi) = A0 + sum_j [(phi_j + phi_j^2 / 2) A_j + sin(phi_j) B_j] with
// analytic derivatives. With `commuting` every term shares one eigenbasis, so
// H and each d_j H commute.
ParamHamiltonianFamily random_family(Rng& rng, Eigen::Index dim, int n_params,
                                     bool commuting = false);

// Uniform in [-1, 1]^D.
ParamVector random_point(Rng& rng, int n_params);

PureState random_pure_state(Rng& rng, Eigen::Index dim);

// Rank-`rank` state with random weights and eigenvectors.
MixedState random_mixed_state(Rng& rng, Eigen::Index dim, Eigen::Index rank);

} // namespace gridqfi
