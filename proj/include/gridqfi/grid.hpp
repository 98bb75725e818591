// grid.hpp — emitter grids, deformation maps and the deformation QFIM
//
// An N x M grid of bivariate-Gaussian photon sources, centred on the origin and
// labelled bottom-left to top-right along rows. A deformation moves every mean
// position mu_j to u_j(phi); the QFIM for phi is a sum over sources of the
// Gaussian Fisher metric contracted with the Jacobians du_j/dphi.

#pragma once

#include "gridqfi/fisher.hpp"

#include <Eigen/Dense>

#include <string>
#include <variant>
#include <vector>

namespace gridqfi {

using Vec2 = Eigen::Vector2d;

struct EmitterGrid {
    int N{1};
    int M{1};
    double d_x{1.0};
    double d_y{1.0};
    double sigma_x{1.0};
    double sigma_y{1.0};
    double rho{0.0};
    // One entry per source, or a single entry applied to every source.
    std::vector<int> photons{1};

    int sources() const noexcept { return N * M; }
    int photons_at(int j) const; // 0-based source index
    bool uniform_photons() const;

    // Throws ValidationError on any violated invariant.
    void validate() const;
};

// Mean positions mu_1..mu_{NM} of the undeformed grid.
std::vector<Vec2> grid_positions(int N, int M, double d_x, double d_y);
std::vector<Vec2> grid_positions(const EmitterGrid& grid);

namespace deform {

struct Stretch {};  // (alpha, beta): diag(alpha, beta)
struct Shear {};    // (iota, kappa): [[1, iota], [kappa, 1]]
struct Rotation {}; // (theta): counterclockwise about the grid centre
struct InhomExp {}; // (gamma): (x, y) -> (x exp(y / gamma), y), gamma != 0

using Stage = std::variant<Stretch, Shear, Rotation, InhomExp>;

int stage_params(const Stage& stage);
std::vector<std::string> stage_param_names(const Stage& stage);
std::string stage_name(const Stage& stage);

} // namespace deform

// A single deformation or a composition of several, applied left to right.
// Parameters of the stages concatenate in declaration order.
class DeformationMap {
public:
    explicit DeformationMap(std::vector<deform::Stage> stages);
    DeformationMap(std::vector<deform::Stage> stages, ParamVector params);

    static DeformationMap stretch(double alpha = 1.0, double beta = 1.0);
    static DeformationMap shear(double iota = 0.0, double kappa = 0.0);
    static DeformationMap rotation(double theta = 0.0);
    static DeformationMap inhom_exp(double gamma);

    int n_params() const noexcept { return n_params_; }
    const std::vector<deform::Stage>& stages() const noexcept { return stages_; }
    const ParamVector& params() const noexcept { return params_; }
    void set_params(ParamVector params);

    // Full parameter names ("alpha", "theta", ...). Repeated names in a
    // composite get a 1-based stage suffix.
    std::vector<std::string> param_names() const;
    // One-letter labels used in output columns (a, b, i, k, t, g).
    std::vector<std::string> param_labels() const;

    // Identity parameter values for every stage. InhomExp has no identity
    // point; its entry is 1 and has_identity() reports false.
    static ParamVector identity_params(const std::vector<deform::Stage>& stages);
    bool has_identity() const;

    Vec2 apply(const Vec2& mu) const { return apply_at(params_, mu); }
    Vec2 apply_at(const ParamVector& phi, const Vec2& mu) const;

    // 2 x D matrix; column m is du/dphi_m at mu.
    Eigen::Matrix<double, 2, Eigen::Dynamic> jacobian_at(const ParamVector& phi, const Vec2& mu) const;

private:
    void check(const ParamVector& phi) const;

    std::vector<deform::Stage> stages_;
    int n_params_{0};
    ParamVector params_;
};

std::vector<Vec2> deformed_positions(const DeformationMap& map, const EmitterGrid& grid);

// Direct sum over sources; valid for every map kind and anisotropic sources.
InfoMatrix qfim_grid(const EmitterGrid& grid, const DeformationMap& map, const ParamVector& phi);

// Closed forms below require sigma_x == sigma_y (bitwise) and uniform photons.
InfoMatrix qfim_stretch_closed(const EmitterGrid& grid);
InfoMatrix shear_qfim(const EmitterGrid& grid);
double qfim_rotation_closed(const EmitterGrid& grid, double theta);

// (d_x / d_y)^2 (N^2 - 1) / (M^2 - 1).
double stretch_ratio(const EmitterGrid& grid);

struct OscillationReport {
    bool oscillates{false};
    std::string diagnostic;
};

// The rotation QFI depends on theta iff rho != 0 and
// d_x^2 (N^2 - 1) != d_y^2 (M^2 - 1).
OscillationReport oscillation_criteria(const EmitterGrid& grid);

// Finite-dimensional stand-in for the field state of one source: a pure state
// on a K x K momentum lattice with Gaussian amplitudes and the diagonal
// Hamiltonian E_k(phi) = -n k . u(phi). Lets the generic generator and QFIM
// machinery run on grid scenarios.
struct MomentumSurrogate {
    ParamHamiltonianFamily family;
    PureState state;
};

MomentumSurrogate momentum_surrogate(const EmitterGrid& grid, const DeformationMap& map,
                                     int source, int lattice = 15, double span_sd = 6.0);

struct SurrogateResult {
    InfoMatrix info;
    Eigen::MatrixXd saturability;
};

// QFIM and saturability matrix of the whole grid through the surrogate
// (both are additive over independent sources).
SurrogateResult surrogate_qfim(const EmitterGrid& grid, const DeformationMap& map,
                               const ParamVector& phi, int lattice = 15, double span_sd = 6.0);

} // namespace gridqfi
