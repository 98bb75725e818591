#include "gridqfi/errors.hpp"
#include "gridqfi/grid.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gridqfi;

namespace {

constexpr double kPi = std::numbers::pi;

EmitterGrid grid32(double rho = 0.0)
{
    EmitterGrid g;
    g.N = 3;
    g.M = 2;
    g.d_x = 1.0;
    g.d_y = 2.0;
    g.rho = rho;
    return g;
}

// Sum of per-source Gaussian position Fisher informations.
Eigen::MatrixXd oracle_qfim(const EmitterGrid& g, const DeformationMap& map, const ParamVector& phi)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(map.n_params(), map.n_params());
    for (const Vec2& mu : grid_positions(g)) {
        out += oracle::gaussian_fisher(map.jacobian_at(phi, mu), g.sigma_x, g.rho);
    }
    return out;
}

} // namespace

TEST_CASE("3 x 2 grid positions, bottom-left first along rows")
{
    const auto pos = grid_positions(3, 2, 1.0, 2.0);
    REQUIRE(pos.size() == 6);
    CHECK(pos[0] == Vec2(-1.0, -1.0));
    CHECK(pos[2] == Vec2(1.0, -1.0));
    CHECK(pos[3] == Vec2(-1.0, 1.0));
    CHECK(pos[5] == Vec2(1.0, 1.0));
    const auto single = grid_positions(1, 1, 1.0, 1.0);
    CHECK(single[0] == Vec2::Zero());
}

TEST_CASE("grid invariants")
{
    EmitterGrid g = grid32();
    g.rho = 1.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = grid32();
    g.photons = {1, 2};
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g.photons = {1, 1, 1, 1, 1, 0};
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = grid32();
    g.sigma_y = 2.0;
    CHECK_THROWS_AS(qfim_stretch_closed(g), ValidationError);
    CHECK_NOTHROW(qfim_grid(g, DeformationMap::stretch(), DeformationMap::stretch().params()));
}

TEST_CASE("uncorrelated 3 x 2 grid, unit spacing (1, 2)")
{
    const EmitterGrid g = grid32();
    const auto st = DeformationMap::stretch();
    const auto sh = DeformationMap::shear();
    const Eigen::Matrix2d stretch_expected = (Eigen::Matrix2d() << 4, 0, 0, 6).finished();
    const Eigen::Matrix2d shear_expected = (Eigen::Matrix2d() << 6, 0, 0, 4).finished();
    CHECK((oracle_qfim(g, st, st.params()) - stretch_expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((qfim_grid(g, st, st.params()).entries - stretch_expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((qfim_stretch_closed(g).entries - stretch_expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((qfim_grid(g, sh, sh.params()).entries - shear_expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((shear_qfim(g).entries - shear_expected).cwiseAbs().maxCoeff() < 1e-14);
    for (double t : {0.0, 0.3, 2.0}) {
        CHECK(qfim_rotation_closed(g, t) == doctest::Approx(10.0).epsilon(1e-15));
    }
    CHECK_FALSE(oscillation_criteria(g).oscillates);
}

TEST_CASE("correlated 3 x 2 grid")
{
    const EmitterGrid g = grid32(0.5);
    const Eigen::Matrix2d expected = (Eigen::Matrix2d() << 16.0 / 3, 0, 0, 8).finished();
    CHECK((qfim_stretch_closed(g).entries - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(qfim_rotation_closed(g, 0.0) == doctest::Approx(40.0 / 3).epsilon(1e-15));
    CHECK(oscillation_criteria(g).oscillates);

    // I(theta) = (4/3)(10 - sin 2 theta): maxima at 3 pi/4, minima at pi/4.
    const auto rot = DeformationMap::rotation();
    for (int k = 0; k < 32; ++k) {
        const double t = 2 * kPi * k / 32;
        const double expected_t = 4.0 / 3.0 * (10.0 - std::sin(2 * t));
        CHECK(qfim_rotation_closed(g, t) == doctest::Approx(expected_t).epsilon(1e-14));
        const ParamVector phi = ParamVector::Constant(1, t);
        CHECK(oracle_qfim(g, rot, phi)(0, 0) == doctest::Approx(expected_t).epsilon(1e-14));
    }
    CHECK(qfim_rotation_closed(g, 3 * kPi / 4) == doctest::Approx(44.0 / 3));
    CHECK(qfim_rotation_closed(g, kPi / 4) == doctest::Approx(12.0));
}

TEST_CASE("photon number enters squared")
{
    EmitterGrid g = grid32();
    g.photons = {3};
    CHECK(qfim_stretch_closed(g)(0, 0) == doctest::Approx(36.0));
    g.photons = {1, 1, 1, 1, 1, 2};
    const auto st = DeformationMap::stretch();
    // Source 6 sits at (1, 1): its alpha contribution grows from 1 to 4.
    CHECK(qfim_grid(g, st, st.params())(0, 0) == doctest::Approx(7.0));
}

TEST_CASE("anisotropic sources against the Gaussian oracle")
{
    EmitterGrid g = grid32(-0.3);
    g.sigma_x = 0.8;
    g.sigma_y = 1.7;
    const DeformationMap map({deform::Rotation{}, deform::Shear{}},
                             (ParamVector(3) << 0.4, 0.1, -0.2).finished());
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
    Eigen::Matrix2d cov;
    cov << 0.64, -0.3 * 0.8 * 1.7, -0.3 * 0.8 * 1.7, 1.7 * 1.7;
    for (const Vec2& mu : grid_positions(g)) {
        const auto j = map.jacobian_at(map.params(), mu);
        expected += j.transpose() * cov.inverse() * j;
    }
    const Eigen::MatrixXd got = qfim_grid(g, map, map.params()).entries;
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("deformation maps")
{
    const Vec2 mu(1.5, -0.5);
    CHECK(DeformationMap::stretch(2.0, 3.0).apply(mu).isApprox(Vec2(3.0, -1.5)));
    CHECK(DeformationMap::shear(0.5, 2.0).apply(mu).isApprox(Vec2(1.25, 2.5)));
    CHECK(DeformationMap::rotation(kPi / 2).apply(mu).isApprox(Vec2(0.5, 1.5)));
    const double gamma = 2.0;
    CHECK(DeformationMap::inhom_exp(gamma).apply(mu).isApprox(Vec2(1.5 * std::exp(-0.25), -0.5)));
    CHECK_THROWS_AS(DeformationMap::inhom_exp(0.0), ValidationError);

    // du_x/dgamma = -x y exp(y / gamma) / gamma^2
    const auto j = DeformationMap::inhom_exp(gamma).jacobian_at(ParamVector::Constant(1, gamma), mu);
    CHECK(j(0, 0) == doctest::Approx(1.5 * 0.5 * std::exp(-0.25) / 4.0).epsilon(1e-15));
    CHECK(j(1, 0) == 0.0);

    const DeformationMap composite({deform::Stretch{}, deform::Rotation{}},
                                   (ParamVector(3) << 2.0, 3.0, kPi / 2).finished());
    CHECK(composite.apply(mu).isApprox(Vec2(1.5, 3.0)));
    CHECK(composite.param_names() == std::vector<std::string>{"alpha", "beta", "theta"});
    CHECK(composite.param_labels() == std::vector<std::string>{"a", "b", "t"});

    const DeformationMap twice({deform::Rotation{}, deform::Rotation{}});
    CHECK(twice.param_names() == std::vector<std::string>{"theta_1", "theta_2"});
    CHECK(twice.has_identity());
    CHECK_FALSE(DeformationMap::inhom_exp(1.0).has_identity());
}

TEST_CASE("oscillation criteria")
{
    EmitterGrid g = grid32(0.0);
    CHECK(oscillation_criteria(g).diagnostic.find("source criterion") != std::string::npos);
    g.rho = 0.5;
    g.N = 2;
    g.M = 2;
    g.d_x = 1.0;
    g.d_y = 1.0;
    const auto r = oscillation_criteria(g);
    CHECK_FALSE(r.oscillates);
    CHECK(r.diagnostic.find("grid criterion") != std::string::npos);
    g.d_y = 2.0;
    CHECK(oscillation_criteria(g).oscillates);
}

TEST_CASE("stretch ratio")
{
    EmitterGrid g = grid32();
    CHECK(stretch_ratio(g) == doctest::Approx(8.0 / 12.0));
    g.M = 1;
    CHECK_THROWS_AS(stretch_ratio(g), ValidationError);
}

TEST_CASE("momentum surrogate reproduces the grid QFIM with vanishing saturability")
{
    const EmitterGrid g = grid32(0.5);
    const DeformationMap map({deform::Rotation{}, deform::Stretch{}},
                             (ParamVector(3) << 0.2, 1.0, 1.0).finished());
    const SurrogateResult r = surrogate_qfim(g, map, map.params());
    const Eigen::MatrixXd direct = qfim_grid(g, map, map.params()).entries;
    CHECK((r.info.entries - direct).cwiseAbs().maxCoeff() < 1e-6 * direct.cwiseAbs().maxCoeff());
    CHECK(r.saturability.cwiseAbs().maxCoeff() < 1e-10);
}
