#include "gridqfi/errors.hpp"
#include "gridqfi/quadrature.hpp"
#include "gridqfi/random_family.hpp"
#include "gridqfi/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gridqfi;

TEST_CASE("non-Hermitian input is rejected with its defect")
{
    CMatrix m(2, 2);
    m << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(HermitianOperator{m}, ValidationError);
    try {
        HermitianOperator h{m};
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(HermitianOperator{CMatrix(2, 3)}, ValidationError);
    CHECK_THROWS_AS(HermitianOperator{CMatrix()}, ValidationError);
}

TEST_CASE("decomposition reconstructs H and resolves the identity")
{
    Rng rng(11);
    for (int dim = 1; dim <= 8; ++dim) {
        const HermitianOperator h = random_hermitian(rng, dim, 2.0);
        const SpectralDecomposition sd = decompose(h);
        const CMatrix& v = sd.eigenvectors;
        const CMatrix rebuilt = v * sd.eigenvalues.cast<cplx>().asDiagonal() * v.adjoint();
        CHECK(max_abs(rebuilt - h.matrix()) < 1e-13);

        CMatrix sum = CMatrix::Zero(dim, dim);
        for (std::size_t k = 0; k < sd.clusters.size(); ++k) {
            const CMatrix pk = projector(sd, k).matrix();
            sum += pk;
            for (std::size_t l = 0; l < sd.clusters.size(); ++l) {
                if (l != k) CHECK(max_abs(pk * projector(sd, l).matrix()) < 1e-10);
            }
        }
        CHECK(max_abs(sum - CMatrix::Identity(dim, dim)) < 1e-12);
        for (Eigen::Index a = 1; a < dim; ++a) CHECK(sd.eigenvalues(a) >= sd.eigenvalues(a - 1));
    }
}

TEST_CASE("degenerate eigenvalues form one cluster")
{
    Rng rng(3);
    const CMatrix u = random_unitary(rng, 4);
    Eigen::VectorXd e(4);
    e << -1.0, 0.5, 0.5, 2.0;
    const HermitianOperator h =
        HermitianOperator::hermitian_part(u * e.cast<cplx>().asDiagonal() * u.adjoint());
    const SpectralDecomposition sd = decompose(h);
    REQUIRE(sd.clusters.size() == 3);
    CHECK(sd.clusters[1].first == 1);
    CHECK(sd.clusters[1].size == 2);
    CHECK(sd.cluster_of[2] == 1);
    CHECK(sd.spectral_range() == doctest::Approx(3.0));

    const CMatrix p = projector(sd, 1).matrix();
    CHECK(max_abs(p * p - p) < 1e-12);
    CHECK(std::abs(p.trace() - cplx(2.0, 0.0)) < 1e-12);
}

TEST_CASE("decomposition is bitwise deterministic")
{
    Rng rng(5);
    const HermitianOperator h = random_hermitian(rng, 6);
    const SpectralDecomposition a = decompose(h);
    const SpectralDecomposition b = decompose(h);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("diagonal input keeps its basis up to ordering")
{
    Eigen::VectorXd d(3);
    d << 2.0, -1.0, 2.0;
    const SpectralDecomposition sd = decompose(HermitianOperator::diagonal(d));
    CHECK(sd.eigenvalues(0) == -1.0);
    CHECK(sd.clusters.size() == 2);
    CHECK(std::abs(sd.eigenvectors(1, 0)) == 1.0);
}

TEST_CASE("evolution matches the matrix exponential")
{
    Rng rng(17);
    for (int dim : {2, 5, 8}) {
        const HermitianOperator h = random_hermitian(rng, dim, 3.0);
        const CMatrix u = evolution(decompose(h));
        CHECK(max_abs(u - oracle::expm_channel(h.matrix())) < 1e-12);
        const CMatrix half = evolution(decompose(h), 0.5);
        CHECK(max_abs(half * half - u) < 1e-12);
    }
}

TEST_CASE("Gauss-Legendre rules")
{
    const QuadratureRule two = gauss_legendre(2);
    CHECK(two.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(two.weights[1] == doctest::Approx(1.0).epsilon(1e-15));

    // n nodes integrate degree 2n - 1 exactly.
    for (int n : {1, 3, 8, 32}) {
        const QuadratureRule rule = gauss_legendre(n, 0.0, 1.0);
        const int degree = 2 * n - 1;
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * std::pow(rule.nodes[i], degree);
        }
        CHECK(sum == doctest::Approx(1.0 / (degree + 1)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(gauss_legendre(0), ValidationError);
}
