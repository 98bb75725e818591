#include "gridqfi/errors.hpp"
#include "gridqfi/generator.hpp"
#include "gridqfi/random_family.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gridqfi;

namespace {

// H(theta) = cos(theta) X + sin(theta) Y
ParamHamiltonianFamily xy_rotor(bool analytic = true)
{
    ParamHamiltonianFamily f;
    f.dim = 2;
    f.n_params = 1;
    f.hamiltonian = [](const ParamVector& p) {
        return HermitianOperator(std::cos(p(0)) * oracle::pauli_x() + std::sin(p(0)) * oracle::pauli_y());
    };
    if (analytic) {
        f.derivative = [](const ParamVector& p, int) {
            return HermitianOperator(-std::sin(p(0)) * oracle::pauli_x() +
                                     std::cos(p(0)) * oracle::pauli_y());
        };
    }
    return f;
}

oracle::HamFn as_fn(const ParamHamiltonianFamily& f)
{
    return [f](const Eigen::VectorXd& p) { return f.hamiltonian_at(p).matrix(); };
}

} // namespace

TEST_CASE("rotating-field generator at theta = 0")
{
    // Frozen: G = sin^2(1) Z + sin(1) cos(1) Y.
    const CMatrix expected =
        std::sin(1.0) * std::sin(1.0) * oracle::pauli_z() + std::sin(1.0) * std::cos(1.0) * oracle::pauli_y();
    const auto family = xy_rotor();
    const ParamVector phi = ParamVector::Zero(1);
    CHECK(max_abs(oracle::generator(as_fn(family), phi, 0) - expected) < 1e-10);

    CHECK(max_abs(generator_spectral(family, phi)[0].matrix() - expected) < 1e-14);
    CHECK(max_abs(generator_duhamel(family, phi)[0].matrix() - expected) < 1e-14);
    CHECK(max_abs(generator_bch(family, phi)[0].matrix() - expected) < 1e-12);
    CHECK(max_abs(generator_fd(family, phi)[0].matrix() - expected) < 1e-9);
}

TEST_CASE("routes agree with the expm oracle on random families")
{
    Rng rng(21);
    for (int i = 0; i < 12; ++i) {
        const Eigen::Index dim = 2 + i % 5;
        const int d = 1 + i % 3;
        const auto family = random_family(rng, dim, d);
        const ParamVector phi = random_point(rng, d);
        const GeneratorSet g = generator_spectral(family, phi);
        REQUIRE(g.size() == static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            CHECK(max_abs(g[j].matrix() - oracle::generator(as_fn(family), phi, j)) < 1e-9);
        }
        CHECK(max_abs(generator_duhamel(family, phi)[0].matrix() - g[0].matrix()) < 1e-12);
        CHECK(max_abs(generator_bch(family, phi)[0].matrix() - g[0].matrix()) < 1e-11);
    }
}

TEST_CASE("degenerate Hamiltonian uses the projected derivative inside the cluster")
{
    Rng rng(8);
    const CMatrix u = random_unitary(rng, 4);
    Eigen::VectorXd e(4);
    e << 0.3, 0.3, 0.3, -1.2;
    const CMatrix h0 = u * e.cast<cplx>().asDiagonal() * u.adjoint();
    const HermitianOperator a = random_hermitian(rng, 4);
    const auto family = make_linear_family({a}, HermitianOperator::hermitian_part(h0));
    const ParamVector phi = ParamVector::Zero(1);
    const CMatrix g = generator_spectral(family, phi)[0].matrix();
    CHECK(max_abs(g - oracle::generator(as_fn(family), phi, 0)) < 1e-9);
    CHECK(max_abs(g - generator_duhamel(family, phi)[0].matrix()) < 1e-12);
}

TEST_CASE("single-term linear family reproduces its term")
{
    Rng rng(4);
    const HermitianOperator a = random_hermitian(rng, 5);
    const auto family = make_linear_family({a});
    ParamVector phi(1);
    phi << 0.8;
    CHECK(max_abs(generator_spectral(family, phi)[0].matrix() - a.matrix()) < 1e-13);
    const GeneratorSet bch = generator_bch(family, phi);
    CHECK(bch.series_order[0] == 0);
}

TEST_CASE("series order and term decay")
{
    Rng rng(2);
    const HermitianOperator h = random_hermitian(rng, 6, 1.0);
    const HermitianOperator dh = random_hermitian(rng, 6, 1.0);
    const auto series = nested_commutator_series(h.matrix(), dh.matrix(), 40, 1e-12);
    CHECK(series.order <= 25);
    CHECK(series.term_norms.back() < 1e-12);
    CHECK(series.term_norms[static_cast<std::size_t>(series.order)] >= 1e-12);
    CHECK_THROWS_AS(nested_commutator_series(h.matrix(), dh.matrix(), 3, 1e-12), NumericalError);
}

TEST_CASE("derivative fallback")
{
    const ParamVector phi = ParamVector::Constant(1, 0.4);
    const auto analytic = xy_rotor(true);
    const auto numeric = xy_rotor(false);
    CHECK(max_abs(numeric.derivative_at(phi, 0).matrix() - analytic.derivative_at(phi, 0).matrix()) < 1e-8);
    CHECK(max_abs(generator_spectral(numeric, phi)[0].matrix() -
                  generator_spectral(analytic, phi)[0].matrix()) < 1e-8);

    // A kink between the two stencils fails the step-halving check.
    ParamHamiltonianFamily kink;
    kink.dim = 1;
    kink.n_params = 1;
    kink.hamiltonian = [](const ParamVector& p) {
        return HermitianOperator::diagonal(Eigen::VectorXd::Constant(1, std::abs(p(0))));
    };
    CHECK_THROWS_AS(kink.derivative_at(ParamVector::Constant(1, 7e-7), 0), NumericalError);
}

TEST_CASE("parameter validation")
{
    const auto family = xy_rotor();
    CHECK_THROWS_AS(generator_spectral(family, ParamVector::Zero(2)), ValidationError);
    CHECK_THROWS_AS(generator_spectral(family, ParamVector::Constant(1, NAN)), ValidationError);
    CHECK_THROWS_AS(generator_duhamel(family, ParamVector::Zero(1), 1), ValidationError);
    CHECK_THROWS_AS(family.derivative_at(ParamVector::Zero(1), 1), ValidationError);
}
