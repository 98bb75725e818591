// quadrature.hpp — Gauss–Legendre nodes and weights

#pragma once

#include <vector>

namespace gridqfi {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss–Legendre rule on [-1, 1], nodes ascending. Newton iteration on
// P_n from the Chebyshev initial guess. Throws ValidationError for n < 1.
QuadratureRule gauss_legendre(int n);

// Same rule affinely mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

} // namespace gridqfi
