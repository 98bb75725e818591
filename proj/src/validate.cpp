// validate.cpp — seeded self-check suites: generator routes, QFIM oracles,
// closed-form grid equivalences

#include "gridqfi/validate.hpp"

#include "gridqfi/errors.hpp"
#include "gridqfi/fisher.hpp"
#include "gridqfi/generator.hpp"
#include "gridqfi/grid.hpp"
#include "gridqfi/random_family.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace gridqfi {

namespace {

constexpr double kPi = std::numbers::pi;

// Running worst residual of one check.
class Check {
public:
    Check(std::string suite, std::string name, double tolerance = 0.0)
    {
        result_.suite = std::move(suite);
        result_.name = std::move(name);
        result_.tolerance = tolerance;
    }

    void observe(double residual, const std::string& where)
    {
        if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
        if (!seen_ || residual > result_.worst) {
            result_.worst = residual;
            result_.detail = where;
            seen_ = true;
        }
    }

    Check& informational()
    {
        result_.informational = true;
        return *this;
    }

    CheckResult finish()
    {
        result_.passed = result_.informational || result_.worst < result_.tolerance ||
                         (result_.tolerance == 0.0 && result_.worst == 0.0);
        return result_;
    }

private:
    CheckResult result_;
    bool seen_{false};
};

double max_diff(const GeneratorSet& a, const GeneratorSet& b)
{
    double out = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        out = std::max(out, max_abs(a[j].matrix() - b[j].matrix()));
    }
    return out;
}

double max_of(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

// max |a - b| / max(max|a|, max|b|); zero when both vanish.
double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    const double diff = (a - b).cwiseAbs().maxCoeff();
    if (scale == 0.0) return diff;
    return diff / scale;
}

std::string family_tag(int index, Eigen::Index dim, int d)
{
    return fmt::format("family {} (dim {}, D {})", index, dim, d);
}

// ---------------------------------------------------------------- generators

constexpr int kRandomFamilies = 60;

void generators_suite(std::uint64_t seed, std::vector<CheckResult>& out)
{
    Rng rng(seed);
    Check routes("generators", "route-agreement", 1e-7);
    Check hermitian("generators", "hermiticity", 1e-10);
    Check quadrature("generators", "duhamel-convergence", 1e-10);
    Check general_commute("generators", "channel-commutation-general");
    general_commute.informational();
    int max_order = 0;

    for (int i = 0; i < kRandomFamilies; ++i) {
        const Eigen::Index dim = 2 + i % 7;
        const int d = 1 + (i / 7) % 3;
        const auto family = random_family(rng, dim, d);
        const ParamVector phi = random_point(rng, d);
        const std::string tag = family_tag(i, dim, d);

        const GeneratorSet spectral = generator_spectral(family, phi);
        const GeneratorSet duhamel = generator_duhamel(family, phi, 32);
        const GeneratorSet bch = generator_bch(family, phi, kDefaultSeriesMaxOrder, 1e-12);
        const GeneratorSet fd = generator_fd(family, phi, 1e-5);
        const GeneratorSet* sets[] = {&spectral, &duhamel, &bch, &fd};
        double worst = 0.0;
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) worst = std::max(worst, max_diff(*sets[a], *sets[b]));
        }
        routes.observe(worst, tag);
        hermitian.observe(std::max(max_of(spectral.antihermitian_residual),
                                   max_of(duhamel.antihermitian_residual)),
                          tag);
        quadrature.observe(max_diff(generator_duhamel(family, phi, 16), duhamel), tag);
        max_order = std::max(max_order, *std::max_element(bch.series_order.begin(),
                                                          bch.series_order.end()));

        const CMatrix u = channel_unitary(family, phi);
        double comm = 0.0;
        for (const auto& g : spectral.generators) {
            comm = std::max(comm, max_abs(g.matrix() * u - u * g.matrix()));
        }
        general_commute.observe(comm, tag);
    }
    out.push_back(routes.finish());
    out.push_back(hermitian.finish());
    out.push_back(quadrature.finish());

    // [G_j, U] vanishes when H and d_j H commute.
    Check commute("generators", "channel-commutation", 1e-9);
    for (int i = 0; i < 20; ++i) {
        const Eigen::Index dim = 2 + i % 7;
        const int d = 1 + i % 3;
        const auto family = random_family(rng, dim, d, true);
        const ParamVector phi = random_point(rng, d);
        const CMatrix u = channel_unitary(family, phi);
        double comm = 0.0;
        for (const auto& g : generator_spectral(family, phi).generators) {
            comm = std::max(comm, max_abs(g.matrix() * u - u * g.matrix()));
        }
        commute.observe(comm, "commuting " + family_tag(i, dim, d));
    }
    out.push_back(commute.finish());
    out.push_back(general_commute.finish());

    // Nested-commutator terms against the 2^n / (n+1)! envelope for a
    // spectral range of 2.
    Check decay("generators", "series-decay", 1e-14);
    Check order("generators", "series-order", 26.0);
    for (int i = 0; i < 10; ++i) {
        const Eigen::Index dim = 2 + i % 7;
        const HermitianOperator h = random_hermitian(rng, dim, 1.0);
        const HermitianOperator dh = random_hermitian(rng, dim, 1.0);
        const auto series = nested_commutator_series(h.matrix(), dh.matrix(),
                                                     kDefaultSeriesMaxOrder, 1e-12);
        double excess = 0.0;
        double envelope = 1.0;
        for (std::size_t n = 0; n < series.term_norms.size(); ++n) {
            if (n > 0) envelope *= 2.0 / static_cast<double>(n + 1);
            excess = std::max(excess, series.term_norms[n] - envelope);
        }
        const std::string tag = fmt::format("range-2 pair {} (dim {})", i, dim);
        decay.observe(excess, tag);
        order.observe(series.order, tag);
    }
    out.push_back(decay.finish());
    out.push_back(order.finish());

    // Linear families: G_j = H_j whenever the terms commute (always for D = 1).
    Check reduction("generators", "multiplicative-reduction", 1e-10);
    Check noncommuting("generators", "multiplicative-noncommuting");
    noncommuting.informational();
    for (int i = 0; i < 30; ++i) {
        const Eigen::Index dim = 2 + i % 7;
        const int d = 1 + i % 3;
        const bool shared_basis = i % 2 == 0 || d == 1;
        const CMatrix basis = random_unitary(rng, dim);
        std::vector<HermitianOperator> terms;
        for (int j = 0; j < d; ++j) {
            if (shared_basis) {
                Eigen::VectorXd e(dim);
                for (Eigen::Index k = 0; k < dim; ++k) e(k) = random_point(rng, 1)(0);
                terms.push_back(HermitianOperator::hermitian_part(
                    basis * e.cast<cplx>().asDiagonal() * basis.adjoint()));
            } else {
                terms.push_back(random_hermitian(rng, dim, 1.0));
            }
        }
        const auto family = make_linear_family(terms);
        const ParamVector phi = random_point(rng, d);
        const GeneratorSet spectral = generator_spectral(family, phi);
        const GeneratorSet duhamel = generator_duhamel(family, phi);
        double worst = 0.0;
        for (int j = 0; j < d; ++j) {
            const auto& hj = terms[static_cast<std::size_t>(j)].matrix();
            worst = std::max({worst, max_abs(spectral[static_cast<std::size_t>(j)].matrix() - hj),
                              max_abs(duhamel[static_cast<std::size_t>(j)].matrix() - hj)});
        }
        const std::string tag = fmt::format("linear family {} (dim {}, D {})", i, dim, d);
        if (shared_basis) {
            reduction.observe(worst, tag);
        } else {
            noncommuting.observe(worst, tag);
        }
    }
    out.push_back(reduction.finish());
    out.push_back(noncommuting.finish());

    Check series_order("generators", "series-order-suite");
    series_order.informational();
    series_order.observe(max_order, "largest n* over the random suite");
    out.push_back(series_order.finish());
}

// ---------------------------------------------------------------------- qfim

QuantumState random_state(Rng& rng, Eigen::Index dim, int i)
{
    if (i % 2 == 0) return random_pure_state(rng, dim);
    const Eigen::Index rank = std::max<Eigen::Index>(2, dim - i % 3);
    return random_mixed_state(rng, dim, std::min(rank, dim));
}

// Computational-basis measurement of U(phi) rho0 U(phi)†: p_k and d_j p_k.
InfoMatrix computational_cfim(const QuantumState& state, const GeneratorSet& gens)
{
    const CMatrix rho = density_matrix(state);
    const Eigen::Index dim = rho.rows();
    std::vector<double> prob(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) prob[static_cast<std::size_t>(k)] = rho(k, k).real();
    std::vector<std::vector<double>> dprob;
    for (const auto& g : gens.generators) {
        const CMatrix d = state_derivative(state, g);
        std::vector<double> col(static_cast<std::size_t>(dim));
        for (Eigen::Index k = 0; k < dim; ++k) col[static_cast<std::size_t>(k)] = d(k, k).real();
        dprob.push_back(std::move(col));
    }
    return cfim_numeric(prob, dprob, 1.0);
}

void qfim_suite(std::uint64_t seed, std::vector<CheckResult>& out)
{
    Rng rng(seed + 1);
    Check oracle_pure("qfim", "fidelity-oracle-pure", 1e-5);
    Check oracle_mixed("qfim", "fidelity-oracle-mixed", 1e-5);
    Check sld_residual("qfim", "sld-residual", 1e-8);
    Check psd("qfim", "psd", 1e-10);
    Check chain("qfim", "bound-chain", 1e-9);

    for (int i = 0; i < 40; ++i) {
        const Eigen::Index dim = 2 + i % 5;
        const int d = 1 + (i / 5) % 3;
        const auto family = random_family(rng, dim, d);
        const ParamVector phi = random_point(rng, d);
        const QuantumState rho0 = random_state(rng, dim, i);
        const QuantumState state = evolve(rho0, channel_unitary(family, phi));
        const GeneratorSet gens = generator_spectral(family, phi);
        const std::string tag = family_tag(i, dim, d);

        const InfoMatrix info = qfim(state, gens);
        const InfoMatrix oracle = qfi_fidelity_oracle(family, rho0, phi, 1e-4);
        const double err = (info.entries - oracle.entries).cwiseAbs().maxCoeff();
        (std::holds_alternative<PureState>(state) ? oracle_pure : oracle_mixed).observe(err, tag);
        psd.observe(-info.min_eigenvalue(), tag);

        const CMatrix rho = density_matrix(state);
        const auto ls = slds(state, gens);
        double res = 0.0;
        for (std::size_t j = 0; j < ls.size(); ++j) {
            const CMatrix lhs = 2.0 * state_derivative(state, gens[j]);
            const CMatrix& l = ls[j].matrix();
            res = std::max(res, max_abs(lhs - (rho * l + l * rho)));
        }
        sld_residual.observe(res, tag);

        // F <= I in the Loewner order, and the weighted bound ordering.
        const InfoMatrix cfim = computational_cfim(state, gens);
        const Eigen::MatrixXd gap = info.entries - cfim.entries;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gap);
        double violation = -es.eigenvalues().minCoeff();
        const double trace_q = info.entries.trace();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(cfim.entries);
        if (trace_q > 0.0 && ec.eigenvalues().minCoeff() > 1e-6 * trace_q &&
            info.min_eigenvalue() > 1e-6 * trace_q) {
            const double bound_c = cfim.entries.inverse().trace();
            const double bound_q = info.entries.inverse().trace();
            violation = std::max(violation, bound_q - bound_c);
        }
        chain.observe(violation, tag);
    }
    out.push_back(oracle_pure.finish());
    out.push_back(oracle_mixed.finish());
    out.push_back(sld_residual.finish());
    out.push_back(psd.finish());
    out.push_back(chain.finish());

    Check pure_limit("qfim", "pure-limit", 1e-10);
    for (int i = 0; i < 20; ++i) {
        const Eigen::Index dim = 2 + i % 6;
        const int d = 1 + i % 3;
        const auto family = random_family(rng, dim, d);
        const ParamVector phi = random_point(rng, d);
        const PureState psi = random_pure_state(rng, dim);
        const GeneratorSet gens = generator_spectral(family, phi);
        const MixedState rank_one(Eigen::VectorXd::Ones(1), psi.amplitudes());
        pure_limit.observe(
            (qfim_mixed(rank_one, gens).entries - qfim_pure(psi, gens).entries).cwiseAbs().maxCoeff(),
            family_tag(i, dim, d));
    }
    out.push_back(pure_limit.finish());
}

// ---------------------------------------------------------------------- grid

EmitterGrid make_grid(int n, int m, double dx, double dy, double rho)
{
    EmitterGrid g;
    g.N = n;
    g.M = m;
    g.d_x = dx;
    g.d_y = dy;
    g.rho = rho;
    return g;
}

std::string grid_tag(const EmitterGrid& g)
{
    return fmt::format("N={} M={} d=({:g},{:g}) rho={:g}", g.N, g.M, g.d_x, g.d_y, g.rho);
}

void grid_suite(std::uint64_t seed, std::vector<CheckResult>& out)
{
    Check stretch("grid", "stretch-equivalence", 1e-12);
    Check shear("grid", "shear-equivalence", 1e-12);
    Check rotation("grid", "rotation-equivalence", 1e-12);
    Check periodic("grid", "rotation-periodicity", 1e-12);
    Check flat("grid", "constant-qfi", 1e-10);
    Check criteria("grid", "oscillation-detected", 0.5);

    const double spacings[] = {0.5, 1.0, 2.0};
    const double rhos[] = {-0.5, 0.0, 0.5};
    const auto stretch_map = DeformationMap::stretch();
    const auto shear_map = DeformationMap::shear();
    const auto rot_map = DeformationMap::rotation();
    ParamVector theta(1);

    for (int n = 1; n <= 10; ++n) {
        for (int m = 1; m <= 10; ++m) {
            for (double dx : spacings) {
                for (double dy : spacings) {
                    for (double rho : rhos) {
                        const EmitterGrid g = make_grid(n, m, dx, dy, rho);
                        const std::string tag = grid_tag(g);
                        stretch.observe(rel_error(qfim_stretch_closed(g).entries,
                                                  qfim_grid(g, stretch_map, stretch_map.params()).entries),
                                        tag);
                        shear.observe(rel_error(shear_qfim(g).entries,
                                                qfim_grid(g, shear_map, shear_map.params()).entries),
                                      tag);
                        for (int k = 0; k < 16; ++k) {
                            theta(0) = kPi * k / 16.0;
                            const double closed = qfim_rotation_closed(g, theta(0));
                            const double direct = qfim_grid(g, rot_map, theta)(0, 0);
                            const double scale = std::max(std::abs(closed), std::abs(direct));
                            rotation.observe(scale == 0.0 ? 0.0 : std::abs(closed - direct) / scale,
                                             fmt::format("{} theta={:.6g}", tag, theta(0)));

                            const double shifted = qfim_rotation_closed(g, theta(0) + kPi);
                            periodic.observe(scale == 0.0 ? std::abs(shifted)
                                                          : std::abs(shifted - closed) / scale,
                                             fmt::format("{} theta={:.6g}", tag, theta(0)));
                            ParamVector t2(1);
                            t2(0) = theta(0) + kPi;
                            const double direct_shifted = qfim_grid(g, rot_map, t2)(0, 0);
                            periodic.observe(scale == 0.0 ? std::abs(direct_shifted)
                                                          : std::abs(direct_shifted - direct) / scale,
                                             fmt::format("{} theta={:.6g} (direct)", tag, theta(0)));
                        }

                        // theta sweep at the default resolution over [0, 2 pi).
                        double lo = std::numeric_limits<double>::infinity();
                        double hi = -lo;
                        double sum = 0.0;
                        for (int k = 0; k < 256; ++k) {
                            theta(0) = 2.0 * kPi * k / 256.0;
                            const double v = qfim_grid(g, rot_map, theta)(0, 0);
                            lo = std::min(lo, v);
                            hi = std::max(hi, v);
                            sum += v;
                        }
                        const double mean = sum / 256.0;
                        const double variation = mean > 0.0 ? (hi - lo) / mean : hi - lo;
                        if (oscillation_criteria(g).oscillates) {
                            // 1 when the sweep visibly oscillates, 0 otherwise.
                            criteria.observe(variation > 1e-6 ? 0.0 : 1.0, tag);
                        } else {
                            flat.observe(variation, tag);
                        }
                    }
                }
            }
        }
    }
    // Degenerate-but-nonzero criterion: d_x^2 (N^2 - 1) = d_y^2 (M^2 - 1).
    for (int n = 2; n <= 10; ++n) {
        const EmitterGrid g = make_grid(n, n, 1.0, 1.0, 0.5);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int k = 0; k < 256; ++k) {
            theta(0) = 2.0 * kPi * k / 256.0;
            const double v = qfim_grid(g, rot_map, theta)(0, 0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        flat.observe((hi - lo) / (0.5 * (hi + lo)), grid_tag(g));
    }
    out.push_back(stretch.finish());
    out.push_back(shear.finish());
    out.push_back(rotation.finish());
    out.push_back(periodic.finish());
    out.push_back(flat.finish());
    out.push_back(criteria.finish());

    // Size scaling and mirror symmetry of the stretch QFIM.
    Check monotone("grid", "stretch-monotonicity", 0.5);
    Check scaling("grid", "stretch-source-scaling", 1e-12);
    Check mirror("grid", "stretch-mirror", 0.0); // exact
    for (int m = 1; m <= 10; ++m) {
        for (double rho : rhos) {
            double prev = -1.0;
            for (int n = 1; n <= 10; ++n) {
                const EmitterGrid g = make_grid(n, m, 1.0, 2.0, rho);
                const double a = qfim_stretch_closed(g)(0, 0);
                const std::string tag = grid_tag(g);
                if (n > 1) monotone.observe(a > prev ? 0.0 : 1.0, tag);
                prev = a;
                const double a1 = qfim_stretch_closed(make_grid(n, 1, 1.0, 2.0, rho))(0, 0);
                const double expect = m * a1;
                scaling.observe(expect == 0.0 ? std::abs(a) : std::abs(a - expect) / expect, tag);
                const EmitterGrid swapped = make_grid(m, n, 2.0, 1.0, rho);
                mirror.observe(std::abs(a - qfim_stretch_closed(swapped)(1, 1)), tag);
                mirror.observe(std::abs(qfim_stretch_closed(g)(1, 1) - qfim_stretch_closed(swapped)(0, 0)),
                               tag);
            }
        }
    }
    out.push_back(monotone.finish());
    out.push_back(scaling.finish());
    out.push_back(mirror.finish());

    // Analytic Jacobians against central differences of apply_at.
    Rng rng(seed + 2);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Check jac("grid", "jacobian-fd", 1e-8);
    const std::vector<DeformationMap> maps = {
        DeformationMap::stretch(1.2, 0.7),
        DeformationMap::shear(0.3, -0.2),
        DeformationMap::rotation(0.4),
        DeformationMap::inhom_exp(2.5),
        DeformationMap({deform::Rotation{}, deform::Stretch{}}, (ParamVector(3) << 0.3, 1.1, 0.9).finished()),
        DeformationMap({deform::Shear{}, deform::InhomExp{}, deform::Rotation{}},
                       (ParamVector(4) << 0.1, 0.2, -3.0, 1.0).finished()),
    };
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const auto& map = maps[k];
        for (int trial = 0; trial < 20; ++trial) {
            const Vec2 mu(3.0 * unit(rng), 3.0 * unit(rng));
            const ParamVector phi = map.params();
            const auto analytic = map.jacobian_at(phi, mu);
            double err = 0.0;
            for (int p = 0; p < map.n_params(); ++p) {
                const double h = 1e-5 * std::max(1.0, std::abs(phi(p)));
                ParamVector plus = phi;
                ParamVector minus = phi;
                plus(p) += h;
                minus(p) -= h;
                const Vec2 fd = (map.apply_at(plus, mu) - map.apply_at(minus, mu)) / (2.0 * h);
                err = std::max(err, (fd - analytic.col(p)).cwiseAbs().maxCoeff());
            }
            const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
            jac.observe(err / scale, fmt::format("map {} mu=({:.4g},{:.4g})", k, mu.x(), mu.y()));
        }
    }
    out.push_back(jac.finish());

    // Generic engine on the momentum surrogate: same QFIM, commuting SLDs.
    Check surrogate("grid", "surrogate-qfim", 1e-6);
    Check sat("grid", "saturability", 1e-10);
    EmitterGrid g = make_grid(3, 2, 1.0, 2.0, 0.5);
    const std::vector<DeformationMap> scenarios = {
        DeformationMap::stretch(), DeformationMap::shear(), DeformationMap::rotation(0.7),
        DeformationMap::inhom_exp(4.0), maps[4],
    };
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        const auto& map = scenarios[k];
        const SurrogateResult r = surrogate_qfim(g, map, map.params());
        const InfoMatrix direct = qfim_grid(g, map, map.params());
        const std::string tag = fmt::format("{} scenario {}", grid_tag(g), k);
        surrogate.observe(rel_error(r.info.entries, direct.entries), tag);
        sat.observe(r.saturability.cwiseAbs().maxCoeff(), tag);
    }
    out.push_back(surrogate.finish());
    out.push_back(sat.finish());
}

} // namespace

bool ValidationReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidationReport run_validation(const std::string& suite, std::uint64_t seed)
{
    ValidationReport report;
    const bool all = suite == "all";
    if (!all && suite != "generators" && suite != "qfim" && suite != "grid") {
        throw ValidationError("unknown validation suite '" + suite +
                              "' (expected generators, qfim, grid or all)");
    }
    if (all || suite == "generators") generators_suite(seed, report.checks);
    if (all || suite == "qfim") qfim_suite(seed, report.checks);
    if (all || suite == "grid") grid_suite(seed, report.checks);
    return report;
}

void print_report(std::ostream& out, const ValidationReport& report)
{
    const CheckResult* worst_fail = nullptr;
    for (const auto& c : report.checks) {
        const char* status = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
        if (c.informational) {
            out << fmt::format("{} {}/{}: worst {:.3e} at {}\n", status, c.suite, c.name, c.worst,
                               c.detail);
        } else {
            out << fmt::format("{} {}/{}: worst {:.3e} (tol {:.1e}) at {}\n", status, c.suite,
                               c.name, c.worst, c.tolerance, c.detail);
        }
        if (!c.passed && (!worst_fail || c.worst / c.tolerance > worst_fail->worst / worst_fail->tolerance)) {
            worst_fail = &c;
        }
    }
    if (worst_fail) {
        out << fmt::format("FAILED: worst residual {:.3e} in {}/{} ({})\n", worst_fail->worst,
                           worst_fail->suite, worst_fail->name, worst_fail->detail);
    } else {
        out << fmt::format("OK: {} checks passed\n", report.checks.size());
    }
}

} // namespace gridqfi
