// generator.cpp — four routes to the local generator of translations

#include "gridqfi/generator.hpp"

#include "gridqfi/errors.hpp"
#include "gridqfi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace gridqfi {

namespace {

constexpr double kFallbackStep = 1e-6;
constexpr double kFallbackSelfCheck = 1e-5;
constexpr double kFdStep = 1e-5;

ParamVector shifted(const ParamVector& phi, int j, double delta)
{
    ParamVector out = phi;
    out(j) += delta;
    return out;
}

// exp(-i x/2) * sin(x/2) / (x/2): the Duhamel weight (e^{-ix} - 1)/(-ix).
cplx duhamel_weight(double x)
{
    const double half = 0.5 * x;
    double sinc = 1.0;
    if (std::abs(half) > 1e-4) {
        sinc = std::sin(half) / half;
    } else {
        const double h2 = half * half;
        sinc = 1.0 - h2 / 6.0 + h2 * h2 / 120.0;
    }
    return std::exp(cplx(0.0, -half)) * sinc;
}

} // namespace

void ParamHamiltonianFamily::check_point(const ParamVector& phi) const
{
    if (phi.size() != n_params) {
        std::ostringstream msg;
        msg << "parameter vector has " << phi.size() << " entries, family expects " << n_params;
        throw ValidationError(msg.str());
    }
    if (!phi.allFinite()) {
        throw ValidationError("parameter vector contains non-finite entries");
    }
}

HermitianOperator ParamHamiltonianFamily::hamiltonian_at(const ParamVector& phi) const
{
    check_point(phi);
    HermitianOperator h = hamiltonian(phi);
    if (h.dim() != dim) {
        throw ValidationError("family returned a Hamiltonian of the wrong dimension");
    }
    return h;
}

HermitianOperator ParamHamiltonianFamily::derivative_at(const ParamVector& phi, int j) const
{
    check_point(phi);
    if (j < 0 || j >= n_params) {
        throw ValidationError("derivative_at: parameter index out of range");
    }
    if (derivative) {
        HermitianOperator d = derivative(phi, j);
        if (d.dim() != dim) {
            throw ValidationError("family returned a derivative of the wrong dimension");
        }
        return d;
    }

    const double step = kFallbackStep * std::max(1.0, std::abs(phi(j)));
    auto central = [&](double h) {
        const CMatrix plus = hamiltonian_at(shifted(phi, j, h)).matrix();
        const CMatrix minus = hamiltonian_at(shifted(phi, j, -h)).matrix();
        return CMatrix((plus - minus) / (2.0 * h));
    };
    const CMatrix full = central(step);
    const CMatrix half = central(0.5 * step);
    const double scale = std::max(1.0, max_abs(full));
    const double gap = max_abs(full - half);
    if (gap > kFallbackSelfCheck * scale) {
        std::ostringstream msg;
        msg << "finite-difference derivative in parameter " << j
            << " failed the step-halving check (change " << gap << ")";
        throw NumericalError(msg.str());
    }
    return HermitianOperator::hermitian_part(full);
}

ParamHamiltonianFamily make_linear_family(std::vector<HermitianOperator> terms,
                                          std::optional<HermitianOperator> offset)
{
    if (terms.empty()) {
        throw ValidationError("make_linear_family: need at least one term");
    }
    const Eigen::Index dim = terms.front().dim();
    for (const auto& t : terms) {
        if (t.dim() != dim) throw ValidationError("make_linear_family: term dimensions differ");
    }
    if (offset && offset->dim() != dim) {
        throw ValidationError("make_linear_family: offset dimension differs");
    }
    ParamHamiltonianFamily family;
    family.dim = dim;
    family.n_params = static_cast<int>(terms.size());
    family.hamiltonian = [terms, offset, dim](const ParamVector& phi) {
        CMatrix h = offset ? offset->matrix() : CMatrix::Zero(dim, dim);
        for (std::size_t j = 0; j < terms.size(); ++j) {
            h += phi(static_cast<Eigen::Index>(j)) * terms[j].matrix();
        }
        return HermitianOperator::hermitian_part(h);
    };
    family.derivative = [terms](const ParamVector&, int j) {
        return terms.at(static_cast<std::size_t>(j));
    };
    return family;
}

ParamHamiltonianFamily make_diagonal_family(
    Eigen::Index dim, int n_params,
    std::function<Eigen::VectorXd(const ParamVector&)> energies,
    std::function<Eigen::VectorXd(const ParamVector&, int)> energy_gradient)
{
    if (dim < 1 || n_params < 1) {
        throw ValidationError("make_diagonal_family: dim and n_params must be positive");
    }
    ParamHamiltonianFamily family;
    family.dim = dim;
    family.n_params = n_params;
    family.hamiltonian = [energies = std::move(energies)](const ParamVector& phi) {
        return HermitianOperator::diagonal(energies(phi));
    };
    if (energy_gradient) {
        family.derivative = [grad = std::move(energy_gradient)](const ParamVector& phi, int j) {
            return HermitianOperator::diagonal(grad(phi, j));
        };
    }
    return family;
}

CMatrix channel_unitary(const ParamHamiltonianFamily& family, const ParamVector& phi)
{
    return evolution(decompose(family.hamiltonian_at(phi)));
}

namespace {

// Spectral generator before symmetrization.
CMatrix raw_spectral_generator(const SpectralDecomposition& decomp, const HermitianOperator& dh)
{
    if (dh.dim() != decomp.dim()) {
        throw ValidationError("generator: derivative dimension does not match Hamiltonian");
    }
    const CMatrix& v = decomp.eigenvectors;
    CMatrix g = v.adjoint() * dh.matrix() * v;
    const Eigen::Index n = decomp.dim();
    for (Eigen::Index b = 0; b < n; ++b) {
        for (Eigen::Index a = 0; a < n; ++a) {
            const auto ca = decomp.cluster_of[static_cast<std::size_t>(a)];
            const auto cb = decomp.cluster_of[static_cast<std::size_t>(b)];
            if (ca != cb) {
                g(a, b) *= duhamel_weight(decomp.eigenvalues(a) - decomp.eigenvalues(b));
            }
        }
    }
    return v * g * v.adjoint();
}

} // namespace

HermitianOperator generator_from_decomposition(const SpectralDecomposition& decomp,
                                               const HermitianOperator& dh)
{
    return HermitianOperator::hermitian_part(raw_spectral_generator(decomp, dh));
}

GeneratorSet generator_spectral(const ParamHamiltonianFamily& family, const ParamVector& phi,
                                double cluster_tol)
{
    const SpectralDecomposition decomp = decompose(family.hamiltonian_at(phi), cluster_tol);
    GeneratorSet out;
    out.generators.reserve(static_cast<std::size_t>(family.n_params));
    for (int j = 0; j < family.n_params; ++j) {
        const CMatrix g = raw_spectral_generator(decomp, family.derivative_at(phi, j));
        out.antihermitian_residual.push_back(hermitian_defect(g));
        out.generators.push_back(HermitianOperator::hermitian_part(g));
    }
    return out;
}

GeneratorSet generator_duhamel(const ParamHamiltonianFamily& family, const ParamVector& phi,
                               int n_nodes)
{
    if (n_nodes < 2) {
        throw ValidationError("generator_duhamel: need at least 2 quadrature nodes");
    }
    const SpectralDecomposition decomp = decompose(family.hamiltonian_at(phi));
    const QuadratureRule rule = gauss_legendre(n_nodes, 0.0, 1.0);

    std::vector<CMatrix> forward;
    std::vector<CMatrix> backward;
    forward.reserve(rule.nodes.size());
    backward.reserve(rule.nodes.size());
    for (double a : rule.nodes) {
        forward.push_back(evolution(decomp, a));
        backward.push_back(forward.back().adjoint());
    }

    GeneratorSet out;
    for (int j = 0; j < family.n_params; ++j) {
        const CMatrix dh = family.derivative_at(phi, j).matrix();
        CMatrix acc = CMatrix::Zero(family.dim, family.dim);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            acc += rule.weights[i] * (forward[i] * dh * backward[i]);
        }
        out.antihermitian_residual.push_back(hermitian_defect(acc));
        out.generators.push_back(HermitianOperator::hermitian_part(acc));
    }
    return out;
}

CommutatorSeries nested_commutator_series(const CMatrix& h, const CMatrix& dh, int max_order,
                                          double term_tol)
{
    if (max_order < 1) {
        throw ValidationError("nested_commutator_series: max_order must be >= 1");
    }
    if (!(term_tol > 0.0)) {
        throw ValidationError("nested_commutator_series: term_tol must be positive");
    }
    CommutatorSeries series;
    CMatrix nested = dh; // ad_H^n(dh)
    series.sum = dh;
    series.term_norms.push_back(max_abs(dh));
    cplx coeff(1.0, 0.0); // (-i)^n / (n+1)!

    for (int n = 1; n <= max_order; ++n) {
        nested = h * nested - nested * h;
        coeff *= cplx(0.0, -1.0) / static_cast<double>(n + 1);
        const CMatrix term = coeff * nested;
        const double norm = max_abs(term);
        series.sum += term;
        series.term_norms.push_back(norm);
        if (norm < term_tol) {
            series.order = n - 1;
            return series;
        }
    }
    std::ostringstream msg;
    msg << "nested commutator series did not converge by order " << max_order
        << " (last term max-norm " << series.term_norms.back() << ")";
    throw NumericalError(msg.str());
}

GeneratorSet generator_bch(const ParamHamiltonianFamily& family, const ParamVector& phi,
                           int max_order, double term_tol)
{
    const CMatrix h = family.hamiltonian_at(phi).matrix();
    GeneratorSet out;
    for (int j = 0; j < family.n_params; ++j) {
        const CommutatorSeries series =
            nested_commutator_series(h, family.derivative_at(phi, j).matrix(), max_order, term_tol);
        const double residual = hermitian_defect(series.sum);
        if (residual >= 10.0 * term_tol) {
            std::ostringstream msg;
            msg << "generator_bch: anti-Hermitian residual " << residual
                << " exceeds 10 * term_tol for parameter " << j;
            throw NumericalError(msg.str());
        }
        out.antihermitian_residual.push_back(residual);
        out.series_order.push_back(series.order);
        out.generators.push_back(HermitianOperator::hermitian_part(series.sum));
    }
    return out;
}

GeneratorSet generator_fd(const ParamHamiltonianFamily& family, const ParamVector& phi, double h)
{
    family.check_point(phi);
    const CMatrix u_adj = channel_unitary(family, phi).adjoint();
    GeneratorSet out;
    for (int j = 0; j < family.n_params; ++j) {
        const double step = h > 0.0 ? h : kFdStep * std::max(1.0, std::abs(phi(j)));
        const CMatrix du = (channel_unitary(family, shifted(phi, j, step)) -
                            channel_unitary(family, shifted(phi, j, -step))) /
                           (2.0 * step);
        const CMatrix g = cplx(0.0, 1.0) * du * u_adj;
        out.antihermitian_residual.push_back(hermitian_defect(g));
        out.generators.push_back(HermitianOperator::hermitian_part(g));
    }
    return out;
}

} // namespace gridqfi
