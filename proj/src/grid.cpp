// grid.cpp — emitter grids, deformation maps, deformation QFIM

#include "gridqfi/grid.hpp"

#include "gridqfi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace gridqfi {

namespace {

using Jac = Eigen::Matrix<double, 2, Eigen::Dynamic>;

constexpr double kCriteriaRelTol = 1e-12;

void require_isotropic(const EmitterGrid& grid, const char* who)
{
    grid.validate();
    if (grid.sigma_x != grid.sigma_y) {
        std::ostringstream msg;
        msg << who << ": closed form requires isotropic sigma (sigma_x == sigma_y); use qfim_grid";
        throw ValidationError(msg.str());
    }
    if (!grid.uniform_photons()) {
        std::ostringstream msg;
        msg << who << ": closed form requires a uniform photon number; use qfim_grid";
        throw ValidationError(msg.str());
    }
}

// s d^2 (L^2 - 1) / 12: the sum of squared centred coordinates along one axis
// of an L-wide grid with s sources in total.
double axis_moment(int sources, int length, double spacing)
{
    return spacing * spacing * sources * (static_cast<double>(length) * length - 1.0) / 12.0;
}

double closed_prefactor(const EmitterGrid& grid)
{
    const double n = grid.photons_at(0);
    return n * n / (grid.sigma_x * grid.sigma_x * (1.0 - grid.rho * grid.rho));
}

} // namespace

int EmitterGrid::photons_at(int j) const
{
    if (photons.size() == 1) return photons.front();
    return photons.at(static_cast<std::size_t>(j));
}

bool EmitterGrid::uniform_photons() const
{
    return std::all_of(photons.begin(), photons.end(),
                       [&](int n) { return n == photons.front(); });
}

void EmitterGrid::validate() const
{
    std::ostringstream msg;
    if (N < 1 || M < 1) {
        msg << "grid: N and M must be >= 1 (got N=" << N << ", M=" << M << ")";
    } else if (!(d_x > 0.0) || !(d_y > 0.0)) {
        msg << "grid: separations d_x, d_y must be positive";
    } else if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) {
        msg << "grid: sigma_x, sigma_y must be positive";
    } else if (!(std::abs(rho) < 1.0)) {
        msg << "grid: correlation rho must satisfy |rho| < 1 (got " << rho << ")";
    } else if (photons.empty() ||
               (photons.size() != 1 && photons.size() != static_cast<std::size_t>(sources()))) {
        msg << "grid: photons must hold 1 or N*M entries";
    } else if (std::any_of(photons.begin(), photons.end(), [](int n) { return n < 1; })) {
        msg << "grid: photon numbers must be positive";
    } else {
        return;
    }
    throw ValidationError(msg.str());
}

std::vector<Vec2> grid_positions(int N, int M, double d_x, double d_y)
{
    if (N < 1 || M < 1) throw ValidationError("grid_positions: N and M must be >= 1");
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(M));
    const int s = N * M;
    for (int j = 1; j <= s; ++j) {
        const double col = ((j - 1) % N) - (N - 1) / 2.0;
        const double row = ((j + N - 1) / N) - (M + 1) / 2.0; // ceil(j / N)
        out.emplace_back(col * d_x, row * d_y);
    }
    return out;
}

std::vector<Vec2> grid_positions(const EmitterGrid& grid)
{
    grid.validate();
    return grid_positions(grid.N, grid.M, grid.d_x, grid.d_y);
}

namespace deform {

int stage_params(const Stage& stage)
{
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Stretch> || std::is_same_v<T, Shear>) return 2;
            else return 1;
        },
        stage);
}

std::vector<std::string> stage_param_names(const Stage& stage)
{
    return std::visit(
        [](const auto& s) -> std::vector<std::string> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Stretch>) return {"alpha", "beta"};
            else if constexpr (std::is_same_v<T, Shear>) return {"iota", "kappa"};
            else if constexpr (std::is_same_v<T, Rotation>) return {"theta"};
            else return {"gamma"};
        },
        stage);
}

std::string stage_name(const Stage& stage)
{
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Stretch>) return "stretch";
            else if constexpr (std::is_same_v<T, Shear>) return "shear";
            else if constexpr (std::is_same_v<T, Rotation>) return "rotation";
            else return "inhom_exp";
        },
        stage);
}

namespace {

// Position after the stage, its spatial Jacobian, and d(position)/d(params).
struct StageEval {
    Vec2 out;
    Eigen::Matrix2d spatial;
    Jac param;
};

StageEval eval(const Stage& stage, const double* p, const Vec2& x)
{
    StageEval e;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Stretch>) {
                e.out = Vec2(p[0] * x.x(), p[1] * x.y());
                e.spatial << p[0], 0.0, 0.0, p[1];
                e.param.resize(2, 2);
                e.param << x.x(), 0.0, 0.0, x.y();
            } else if constexpr (std::is_same_v<T, Shear>) {
                e.out = Vec2(x.x() + p[0] * x.y(), p[1] * x.x() + x.y());
                e.spatial << 1.0, p[0], p[1], 1.0;
                e.param.resize(2, 2);
                e.param << x.y(), 0.0, 0.0, x.x();
            } else if constexpr (std::is_same_v<T, Rotation>) {
                const double c = std::cos(p[0]);
                const double sn = std::sin(p[0]);
                e.out = Vec2(c * x.x() - sn * x.y(), sn * x.x() + c * x.y());
                e.spatial << c, -sn, sn, c;
                e.param.resize(2, 1);
                e.param << -e.out.y(), e.out.x();
            } else {
                const double g = p[0];
                if (g == 0.0) throw ValidationError("inhom_exp: gamma must be non-zero");
                const double ex = std::exp(x.y() / g);
                e.out = Vec2(x.x() * ex, x.y());
                e.spatial << ex, x.x() * ex / g, 0.0, 1.0;
                e.param.resize(2, 1);
                e.param << -x.x() * x.y() * ex / (g * g), 0.0;
            }
        },
        stage);
    return e;
}

} // namespace

} // namespace deform

DeformationMap::DeformationMap(std::vector<deform::Stage> stages)
    : DeformationMap(stages, identity_params(stages))
{
}

DeformationMap::DeformationMap(std::vector<deform::Stage> stages, ParamVector params)
    : stages_(std::move(stages))
{
    if (stages_.empty()) throw ValidationError("DeformationMap: need at least one stage");
    for (const auto& s : stages_) n_params_ += deform::stage_params(s);
    set_params(std::move(params));
}

DeformationMap DeformationMap::stretch(double alpha, double beta)
{
    return DeformationMap({deform::Stretch{}}, ParamVector{{alpha, beta}});
}

DeformationMap DeformationMap::shear(double iota, double kappa)
{
    return DeformationMap({deform::Shear{}}, ParamVector{{iota, kappa}});
}

DeformationMap DeformationMap::rotation(double theta)
{
    return DeformationMap({deform::Rotation{}}, ParamVector{{theta}});
}

DeformationMap DeformationMap::inhom_exp(double gamma)
{
    return DeformationMap({deform::InhomExp{}}, ParamVector{{gamma}});
}

void DeformationMap::set_params(ParamVector params)
{
    check(params);
    params_ = std::move(params);
}

void DeformationMap::check(const ParamVector& phi) const
{
    if (phi.size() != n_params_) {
        std::ostringstream msg;
        msg << "deformation expects " << n_params_ << " parameters, got " << phi.size();
        throw ValidationError(msg.str());
    }
    if (!phi.allFinite()) throw ValidationError("deformation parameters must be finite");
    Eigen::Index offset = 0;
    for (const auto& s : stages_) {
        if (std::holds_alternative<deform::InhomExp>(s) && phi(offset) == 0.0) {
            throw ValidationError("inhom_exp: gamma must be non-zero");
        }
        offset += deform::stage_params(s);
    }
}

std::vector<std::string> DeformationMap::param_names() const
{
    std::vector<std::string> names;
    std::map<std::string, int> count;
    for (const auto& s : stages_) {
        for (const auto& n : deform::stage_param_names(s)) ++count[n];
    }
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        for (const auto& n : deform::stage_param_names(stages_[i])) {
            names.push_back(count[n] > 1 ? n + "_" + std::to_string(i + 1) : n);
        }
    }
    return names;
}

std::vector<std::string> DeformationMap::param_labels() const
{
    std::vector<std::string> labels;
    for (const auto& name : param_names()) {
        const auto underscore = name.find('_');
        std::string label(1, name.front());
        if (underscore != std::string::npos) label += name.substr(underscore + 1);
        labels.push_back(label);
    }
    return labels;
}

ParamVector DeformationMap::identity_params(const std::vector<deform::Stage>& stages)
{
    std::vector<double> values;
    for (const auto& s : stages) {
        std::visit(
            [&](const auto& st) {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, deform::Stretch>) values.insert(values.end(), {1.0, 1.0});
                else if constexpr (std::is_same_v<T, deform::Shear>) values.insert(values.end(), {0.0, 0.0});
                else if constexpr (std::is_same_v<T, deform::Rotation>) values.push_back(0.0);
                else values.push_back(1.0);
            },
            s);
    }
    return Eigen::Map<ParamVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

bool DeformationMap::has_identity() const
{
    return std::none_of(stages_.begin(), stages_.end(), [](const deform::Stage& s) {
        return std::holds_alternative<deform::InhomExp>(s);
    });
}

Vec2 DeformationMap::apply_at(const ParamVector& phi, const Vec2& mu) const
{
    check(phi);
    Vec2 x = mu;
    int offset = 0;
    for (const auto& s : stages_) {
        x = deform::eval(s, phi.data() + offset, x).out;
        offset += deform::stage_params(s);
    }
    return x;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> DeformationMap::jacobian_at(const ParamVector& phi,
                                                                     const Vec2& mu) const
{
    check(phi);
    // Forward pass: record each stage's parameter Jacobian and push earlier
    // columns through the spatial Jacobian of every later stage.
    Jac out = Jac::Zero(2, n_params_);
    Vec2 x = mu;
    int offset = 0;
    for (const auto& s : stages_) {
        const deform::StageEval e = deform::eval(s, phi.data() + offset, x);
        if (offset > 0) out.leftCols(offset) = e.spatial * out.leftCols(offset);
        const int k = deform::stage_params(s);
        out.middleCols(offset, k) = e.param;
        offset += k;
        x = e.out;
    }
    return out;
}

std::vector<Vec2> deformed_positions(const DeformationMap& map, const EmitterGrid& grid)
{
    std::vector<Vec2> out;
    for (const auto& mu : grid_positions(grid)) out.push_back(map.apply(mu));
    return out;
}

InfoMatrix qfim_grid(const EmitterGrid& grid, const DeformationMap& map, const ParamVector& phi)
{
    grid.validate();
    const auto positions = grid_positions(grid);
    const int d = map.n_params();
    const double sx = grid.sigma_x;
    const double sy = grid.sigma_y;
    const double r = grid.rho;

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t j = 0; j < positions.size(); ++j) {
        const Jac jac = map.jacobian_at(phi, positions[j]);
        const double n = grid.photons_at(static_cast<int>(j));
        const double w = n * n / (1.0 - r * r);
        for (int m = 0; m < d; ++m) {
            for (int k = 0; k < d; ++k) {
                const double xx = jac(0, m) * jac(0, k) / (sx * sx);
                const double yy = jac(1, m) * jac(1, k) / (sy * sy);
                const double xy = r * (jac(0, m) * jac(1, k) + jac(1, m) * jac(0, k)) / (sx * sy);
                out(m, k) += w * (xx + yy - xy);
            }
        }
    }
    return InfoMatrix{out, InfoKind::Quantum};
}

InfoMatrix qfim_stretch_closed(const EmitterGrid& grid)
{
    require_isotropic(grid, "qfim_stretch_closed");
    const double pre = closed_prefactor(grid);
    const int s = grid.sources();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2, 2);
    out(0, 0) = pre * axis_moment(s, grid.N, grid.d_x);
    out(1, 1) = pre * axis_moment(s, grid.M, grid.d_y);
    return InfoMatrix{out, InfoKind::Quantum};
}

InfoMatrix shear_qfim(const EmitterGrid& grid)
{
    require_isotropic(grid, "shear_qfim");
    // iota moves x in proportion to y and kappa moves y in proportion to x:
    // the stretch moments with the axes interchanged.
    const double pre = closed_prefactor(grid);
    const int s = grid.sources();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2, 2);
    out(0, 0) = pre * axis_moment(s, grid.M, grid.d_y);
    out(1, 1) = pre * axis_moment(s, grid.N, grid.d_x);
    return InfoMatrix{out, InfoKind::Quantum};
}

double qfim_rotation_closed(const EmitterGrid& grid, double theta)
{
    require_isotropic(grid, "qfim_rotation_closed");
    const double pre = closed_prefactor(grid);
    const int s = grid.sources();
#ifdef GRIDQFI_MUTATE_ROTATION_SIGN
    const double osc = -grid.rho * std::sin(2.0 * theta);
#else
    const double osc = grid.rho * std::sin(2.0 * theta);
#endif
    return pre * (axis_moment(s, grid.N, grid.d_x) * (1.0 + osc) +
                  axis_moment(s, grid.M, grid.d_y) * (1.0 - osc));
}

double stretch_ratio(const EmitterGrid& grid)
{
    grid.validate();
    if (grid.M < 2) {
        throw ValidationError("stretch_ratio: division by zero, M^2 - 1 = 0 for M = 1");
    }
    const double q = grid.d_x / grid.d_y;
    return q * q * (static_cast<double>(grid.N) * grid.N - 1.0) /
           (static_cast<double>(grid.M) * grid.M - 1.0);
}

OscillationReport oscillation_criteria(const EmitterGrid& grid)
{
    grid.validate();
    const double x_side = grid.d_x * grid.d_x * (static_cast<double>(grid.N) * grid.N - 1.0);
    const double y_side = grid.d_y * grid.d_y * (static_cast<double>(grid.M) * grid.M - 1.0);
    const bool source_ok = grid.rho != 0.0;
    const bool grid_ok =
        std::abs(x_side - y_side) > kCriteriaRelTol * std::max(std::abs(x_side), std::abs(y_side));

    OscillationReport report;
    report.oscillates = source_ok && grid_ok;
    if (report.oscillates) {
        report.diagnostic = "oscillatory: rho != 0 and d_x^2(N^2-1) != d_y^2(M^2-1)";
    } else if (!source_ok && !grid_ok) {
        report.diagnostic = "constant: source criterion (rho = 0) and grid criterion "
                            "(d_x^2(N^2-1) = d_y^2(M^2-1)) both fail";
    } else if (!source_ok) {
        report.diagnostic = "constant: source criterion fails (rho = 0)";
    } else {
        report.diagnostic = "constant: grid criterion fails (d_x^2(N^2-1) = d_y^2(M^2-1))";
    }
    return report;
}

MomentumSurrogate momentum_surrogate(const EmitterGrid& grid, const DeformationMap& map,
                                     int source, int lattice, double span_sd)
{
    grid.validate();
    if (source < 0 || source >= grid.sources()) {
        throw ValidationError("momentum_surrogate: source index out of range");
    }
    if (lattice < 2 || !(span_sd > 0.0)) {
        throw ValidationError("momentum_surrogate: need lattice >= 2 and a positive span");
    }
    // |amplitude(k)|^2 ~ exp(-2 k^T Sigma k): momentum covariance Sigma^{-1} / 4.
    Eigen::Matrix2d sigma;
    sigma << grid.sigma_x * grid.sigma_x, grid.rho * grid.sigma_x * grid.sigma_y,
        grid.rho * grid.sigma_x * grid.sigma_y, grid.sigma_y * grid.sigma_y;
    const Eigen::Matrix2d k_cov = 0.25 * sigma.inverse();
    const double half_x = span_sd * std::sqrt(k_cov(0, 0));
    const double half_y = span_sd * std::sqrt(k_cov(1, 1));

    const Eigen::Index dim = static_cast<Eigen::Index>(lattice) * lattice;
    Eigen::Matrix<double, Eigen::Dynamic, 2> k(dim, 2);
    Eigen::VectorXd weight(dim);
    for (int iy = 0; iy < lattice; ++iy) {
        for (int ix = 0; ix < lattice; ++ix) {
            const Eigen::Index row = static_cast<Eigen::Index>(iy) * lattice + ix;
            const Vec2 kv(-half_x + 2.0 * half_x * ix / (lattice - 1),
                          -half_y + 2.0 * half_y * iy / (lattice - 1));
            k.row(row) = kv.transpose();
            weight(row) = std::exp(-2.0 * kv.dot(sigma * kv));
        }
    }
    weight /= weight.sum();
    const CVector amplitudes = weight.cwiseSqrt().cast<cplx>();

    const Vec2 mu = grid_positions(grid)[static_cast<std::size_t>(source)];
    const double n = grid.photons_at(source);
    auto energies = [k, map, mu, n](const ParamVector& phi) -> Eigen::VectorXd {
        return -n * (k * map.apply_at(phi, mu));
    };
    auto gradient = [k, map, mu, n](const ParamVector& phi, int j) -> Eigen::VectorXd {
        return -n * (k * map.jacobian_at(phi, mu).col(j));
    };
    return MomentumSurrogate{
        make_diagonal_family(dim, map.n_params(), std::move(energies), std::move(gradient)),
        PureState(amplitudes)};
}

SurrogateResult surrogate_qfim(const EmitterGrid& grid, const DeformationMap& map,
                               const ParamVector& phi, int lattice, double span_sd)
{
    grid.validate();
    const int d = map.n_params();
    SurrogateResult result{InfoMatrix{Eigen::MatrixXd::Zero(d, d), InfoKind::Quantum},
                           Eigen::MatrixXd::Zero(d, d)};
    for (int j = 0; j < grid.sources(); ++j) {
        const MomentumSurrogate sur = momentum_surrogate(grid, map, j, lattice, span_sd);
        const QuantumState state = evolve(sur.state, channel_unitary(sur.family, phi));
        const GeneratorSet gens = generator_spectral(sur.family, phi);
        result.info.entries += qfim(state, gens).entries;
        const auto ls = slds(state, gens);
        result.saturability += saturability(state, ls);
    }
    return result;
}

} // namespace gridqfi
