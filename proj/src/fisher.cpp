// fisher.cpp — QFIM, SLD, saturability, bounds and the fidelity oracle

#include "gridqfi/fisher.hpp"

#include "gridqfi/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gridqfi {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kOrthoTol = 1e-10;
constexpr double kPsdTol = 1e-10;
constexpr double kCostSymTol = 1e-12;
constexpr double kCfimNormTol = 1e-6;
constexpr double kCfimFloor = 1e-12;

// Symmetrize and reject outputs that are not PSD within tolerance.
InfoMatrix finish(Eigen::MatrixXd m, InfoKind kind)
{
    InfoMatrix out{0.5 * (m + m.transpose()), kind};
    if (out.size() > 0) {
        const double scale = std::max(1.0, out.entries.cwiseAbs().maxCoeff());
        const double lo = out.min_eigenvalue();
        if (lo < -kPsdTol * scale) {
            std::ostringstream msg;
            msg << "information matrix is not positive semidefinite (min eigenvalue " << lo << ")";
            throw NumericalError(msg.str());
        }
    }
    return out;
}

void check_generators(const GeneratorSet& gens, Eigen::Index dim)
{
    if (gens.size() == 0) {
        throw ValidationError("need at least one generator");
    }
    for (const auto& g : gens.generators) {
        if (g.dim() != dim) {
            std::ostringstream msg;
            msg << "dimension mismatch: state has dim " << dim << ", generator has dim " << g.dim();
            throw ValidationError(msg.str());
        }
    }
}

MixedState as_mixed(const QuantumState& state)
{
    if (const auto* pure = std::get_if<PureState>(&state)) {
        return MixedState(Eigen::VectorXd::Ones(1), pure->amplitudes());
    }
    return std::get<MixedState>(state);
}

// Columns of `v` followed by an orthonormal basis of their complement.
CMatrix complete_basis(const CMatrix& v)
{
    const Eigen::Index n = v.rows();
    const Eigen::Index r = v.cols();
    CMatrix basis(n, n);
    basis.leftCols(r) = v;
    if (r < n) {
        Eigen::HouseholderQR<CMatrix> qr(v);
        const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
        basis.rightCols(n - r) = q.rightCols(n - r);
    }
    return basis;
}

} // namespace

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes))
{
    if (amplitudes_.size() == 0) {
        throw ValidationError("PureState: empty amplitude vector");
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTol) {
        std::ostringstream msg;
        msg << "PureState: amplitudes have norm " << norm << ", expected 1";
        throw ValidationError(msg.str());
    }
}

MixedState::MixedState(Eigen::VectorXd weights, CMatrix eigenvectors)
    : weights_(std::move(weights)), eigenvectors_(std::move(eigenvectors))
{
    if (weights_.size() == 0 || weights_.size() != eigenvectors_.cols()) {
        throw ValidationError("MixedState: need one eigenvector column per weight");
    }
    if (eigenvectors_.cols() > eigenvectors_.rows()) {
        throw ValidationError("MixedState: more eigenvectors than the Hilbert-space dimension");
    }
    if ((weights_.array() < 0.0).any()) {
        throw ValidationError("MixedState: weights must be non-negative");
    }
    if (std::abs(weights_.sum() - 1.0) > kNormTol) {
        std::ostringstream msg;
        msg << "MixedState: weights sum to " << weights_.sum() << ", expected 1";
        throw ValidationError(msg.str());
    }
    const Eigen::Index r = eigenvectors_.cols();
    const double ortho =
        max_abs(eigenvectors_.adjoint() * eigenvectors_ - CMatrix::Identity(r, r));
    if (ortho > kOrthoTol) {
        std::ostringstream msg;
        msg << "MixedState: eigenvectors are not orthonormal (defect " << ortho << ")";
        throw ValidationError(msg.str());
    }
}

CMatrix MixedState::density() const
{
    return eigenvectors_ * weights_.cast<cplx>().asDiagonal() * eigenvectors_.adjoint();
}

Eigen::Index state_dim(const QuantumState& state)
{
    return std::visit([](const auto& s) { return s.dim(); }, state);
}

CMatrix density_matrix(const QuantumState& state)
{
    if (const auto* pure = std::get_if<PureState>(&state)) {
        return pure->amplitudes() * pure->amplitudes().adjoint();
    }
    return std::get<MixedState>(state).density();
}

QuantumState evolve(const QuantumState& state, const CMatrix& unitary)
{
    if (unitary.rows() != state_dim(state) || unitary.cols() != state_dim(state)) {
        throw ValidationError("evolve: unitary dimension does not match state");
    }
    if (const auto* pure = std::get_if<PureState>(&state)) {
        CVector v = unitary * pure->amplitudes();
        v.normalize();
        return PureState(std::move(v));
    }
    const auto& mixed = std::get<MixedState>(state);
    CMatrix v = unitary * mixed.eigenvectors();
    // Re-orthonormalize to keep rounding from accumulating across evolutions.
    Eigen::HouseholderQR<CMatrix> qr(v);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(v.rows(), v.cols());
    const CMatrix r = q.adjoint() * v;
    CMatrix fixed = q;
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const cplx d = r(c, c);
        if (std::abs(d) > 0.0) fixed.col(c) *= d / std::abs(d);
    }
    return MixedState(mixed.weights(), std::move(fixed));
}

double InfoMatrix::min_eigenvalue() const
{
    if (entries.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

CostMatrix::CostMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries))
{
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw ValidationError("CostMatrix: must be square and non-empty");
    }
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > kCostSymTol) {
        throw ValidationError("CostMatrix: must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_, Eigen::EigenvaluesOnly);
    if (!(solver.eigenvalues()(0) > 0.0)) {
        throw ValidationError("CostMatrix: must be positive definite");
    }
}

CostMatrix CostMatrix::identity(Eigen::Index d)
{
    return CostMatrix(Eigen::MatrixXd::Identity(d, d));
}

InfoMatrix qfim_pure(const PureState& psi, const GeneratorSet& gens)
{
    check_generators(gens, psi.dim());
    const auto d = static_cast<Eigen::Index>(gens.size());
    std::vector<CVector> applied;
    applied.reserve(gens.size());
    CVector means(d);
    for (Eigen::Index m = 0; m < d; ++m) {
        applied.push_back(gens[static_cast<std::size_t>(m)].matrix() * psi.amplitudes());
        means(m) = psi.amplitudes().dot(applied.back());
    }
    Eigen::MatrixXd out(d, d);
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            // <psi|G_m G_n|psi> = (G_m psi)† (G_n psi)
            const cplx second = applied[static_cast<std::size_t>(m)].dot(applied[static_cast<std::size_t>(n)]);
            out(m, n) = 4.0 * (second - means(m) * means(n)).real();
        }
    }
    return finish(std::move(out), InfoKind::Quantum);
}

InfoMatrix qfim_mixed(const MixedState& rho, const GeneratorSet& gens, double support_tol)
{
    check_generators(gens, rho.dim());
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < rho.weights().size(); ++j) {
        if (rho.weights()(j) > support_tol) support.push_back(j);
    }
    const CMatrix vs = [&] {
        CMatrix v(rho.dim(), static_cast<Eigen::Index>(support.size()));
        for (std::size_t c = 0; c < support.size(); ++c) {
            v.col(static_cast<Eigen::Index>(c)) = rho.eigenvectors().col(support[c]);
        }
        return v;
    }();

    const auto d = static_cast<Eigen::Index>(gens.size());
    // Matrix elements of each generator in the support basis, and the
    // generator applied to each support vector.
    std::vector<CMatrix> elems;
    std::vector<CMatrix> applied;
    for (const auto& g : gens.generators) {
        applied.push_back(g.matrix() * vs);
        elems.push_back(vs.adjoint() * applied.back());
    }

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            const auto& am = applied[static_cast<std::size_t>(m)];
            const auto& an = applied[static_cast<std::size_t>(n)];
            const auto& em = elems[static_cast<std::size_t>(m)];
            const auto& en = elems[static_cast<std::size_t>(n)];
            double acc = 0.0;
            for (std::size_t a = 0; a < support.size(); ++a) {
                const auto ia = static_cast<Eigen::Index>(a);
                const double pa = rho.weights()(support[a]);
                // Symmetrized covariance on the a-th eigenstate.
                const double cov = am.col(ia).dot(an.col(ia)).real() -
                                   (em(ia, ia) * en(ia, ia)).real();
                acc += 4.0 * pa * cov;
                for (std::size_t b = 0; b < support.size(); ++b) {
                    if (a == b) continue;
                    const auto ib = static_cast<Eigen::Index>(b);
                    const double pb = rho.weights()(support[b]);
                    acc -= 8.0 * pa * pb / (pa + pb) * (em(ia, ib) * en(ib, ia)).real();
                }
            }
            out(m, n) = acc;
        }
    }
    return finish(std::move(out), InfoKind::Quantum);
}

InfoMatrix qfim(const QuantumState& state, const GeneratorSet& gens, double support_tol)
{
    if (const auto* pure = std::get_if<PureState>(&state)) return qfim_pure(*pure, gens);
    return qfim_mixed(std::get<MixedState>(state), gens, support_tol);
}

CMatrix state_derivative(const QuantumState& state, const HermitianOperator& generator)
{
    if (generator.dim() != state_dim(state)) {
        throw ValidationError("state_derivative: dimension mismatch");
    }
    const CMatrix rho = density_matrix(state);
    const CMatrix& g = generator.matrix();
    return cplx(0.0, -1.0) * (g * rho - rho * g);
}

HermitianOperator sld(const QuantumState& state, const GeneratorSet& gens, std::size_t j,
                      double support_tol)
{
    check_generators(gens, state_dim(state));
    if (j >= gens.size()) {
        throw ValidationError("sld: parameter index out of range");
    }
    const MixedState mixed = as_mixed(state);
    const Eigen::Index n = mixed.dim();
    const CMatrix basis = complete_basis(mixed.eigenvectors());
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    p.head(mixed.weights().size()) = mixed.weights();

    // In the state eigenbasis d_j rho has elements -i G_kl (p_l - p_k).
    const CMatrix g = basis.adjoint() * gens[j].matrix() * basis;
    CMatrix l = CMatrix::Zero(n, n);
    for (Eigen::Index b = 0; b < n; ++b) {
        for (Eigen::Index a = 0; a < n; ++a) {
            const double denom = p(a) + p(b);
            if (denom < support_tol) continue;
            l(a, b) = 2.0 * cplx(0.0, -1.0) * g(a, b) * (p(b) - p(a)) / denom;
        }
    }
    return HermitianOperator::hermitian_part(basis * l * basis.adjoint());
}

std::vector<HermitianOperator> slds(const QuantumState& state, const GeneratorSet& gens,
                                    double support_tol)
{
    std::vector<HermitianOperator> out;
    out.reserve(gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j) out.push_back(sld(state, gens, j, support_tol));
    return out;
}

Eigen::MatrixXd saturability(const QuantumState& state, std::span<const HermitianOperator> slds)
{
    const auto d = static_cast<Eigen::Index>(slds.size());
    for (const auto& l : slds) {
        if (l.dim() != state_dim(state)) throw ValidationError("saturability: dimension mismatch");
    }
    const CMatrix rho = density_matrix(state);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = j + 1; k < d; ++k) {
            const CMatrix& a = slds[static_cast<std::size_t>(j)].matrix();
            const CMatrix& b = slds[static_cast<std::size_t>(k)].matrix();
            const double value = (rho * (a * b - b * a)).trace().imag();
            out(j, k) = value;
            out(k, j) = -value;
        }
    }
    return out;
}

double qcrb_scalar(const InfoMatrix& info, const CostMatrix& cost, int repetitions)
{
    if (repetitions < 1) {
        throw ValidationError("qcrb_scalar: repetitions must be a positive integer");
    }
    const Eigen::Index d = info.size();
    if (d == 0 || cost.matrix().rows() != d) {
        throw ValidationError("qcrb_scalar: cost matrix and information matrix sizes differ");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(info.entries);
    const double trace = info.entries.trace();
    const double floor = 1e-12 * trace / static_cast<double>(d);
    if (!(solver.eigenvalues()(0) > floor) || !(trace > 0.0)) {
        Eigen::VectorXd null_dir = solver.eigenvectors().col(0);
        // Fix the sign so the largest component is positive.
        Eigen::Index idx = 0;
        null_dir.cwiseAbs().maxCoeff(&idx);
        if (null_dir(idx) < 0.0) null_dir = -null_dir;
        std::ostringstream msg;
        msg << "unidentifiable parameter combination: information matrix is singular along ("
            << null_dir.transpose() << ")";
        throw SingularInformationError(msg.str(), null_dir);
    }
    const Eigen::MatrixXd inverse = solver.eigenvectors() *
                                    solver.eigenvalues().cwiseInverse().asDiagonal() *
                                    solver.eigenvectors().transpose();
    return (cost.matrix() * inverse).trace() / static_cast<double>(repetitions);
}

InfoMatrix cfim_numeric(std::span<const double> prob, std::span<const std::vector<double>> dprob,
                        double dx)
{
    if (!(dx > 0.0)) throw ValidationError("cfim_numeric: dx must be positive");
    if (dprob.empty()) throw ValidationError("cfim_numeric: need at least one derivative");
    for (const auto& dp : dprob) {
        if (dp.size() != prob.size()) {
            throw ValidationError("cfim_numeric: derivative sample count differs from density");
        }
    }
    double mass = 0.0;
    for (double p : prob) {
        if (p < 0.0) throw ValidationError("cfim_numeric: density must be non-negative");
        mass += p * dx;
    }
    if (std::abs(mass - 1.0) > kCfimNormTol) {
        std::ostringstream msg;
        msg << "cfim_numeric: density integrates to " << mass << ", expected 1";
        throw ValidationError(msg.str());
    }
    const auto d = static_cast<Eigen::Index>(dprob.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t x = 0; x < prob.size(); ++x) {
        if (prob[x] < kCfimFloor) continue;
        for (Eigen::Index m = 0; m < d; ++m) {
            for (Eigen::Index n = 0; n < d; ++n) {
                out(m, n) += dx * dprob[static_cast<std::size_t>(m)][x] *
                             dprob[static_cast<std::size_t>(n)][x] / prob[x];
            }
        }
    }
    return finish(std::move(out), InfoKind::Classical);
}

double root_fidelity(const QuantumState& a, const QuantumState& b)
{
    if (state_dim(a) != state_dim(b)) throw ValidationError("root_fidelity: dimension mismatch");
    const auto* pa = std::get_if<PureState>(&a);
    const auto* pb = std::get_if<PureState>(&b);
    if (pa && pb) {
        return std::abs(pa->amplitudes().dot(pb->amplitudes()));
    }
    // sqrt(rho) sqrt(sigma) = V sqrt(P) (V† W) sqrt(Q) W†; its trace norm is
    // the nuclear norm of the small middle factor.
    const MixedState ma = as_mixed(a);
    const MixedState mb = as_mixed(b);
    const CMatrix middle = ma.weights().cwiseSqrt().cast<cplx>().asDiagonal() *
                           (ma.eigenvectors().adjoint() * mb.eigenvectors()) *
                           mb.weights().cwiseSqrt().cast<cplx>().asDiagonal();
    Eigen::JacobiSVD<CMatrix> svd(middle);
    return svd.singularValues().sum();
}

InfoMatrix qfi_fidelity_oracle(const ParamHamiltonianFamily& family, const QuantumState& rho0,
                               const ParamVector& phi, double delta)
{
    family.check_point(phi);
    if (!(delta > 0.0)) throw ValidationError("qfi_fidelity_oracle: delta must be positive");
    if (state_dim(rho0) != family.dim) {
        throw ValidationError("qfi_fidelity_oracle: state dimension does not match family");
    }
    const QuantumState here = evolve(rho0, channel_unitary(family, phi));

    // v^T I v from symmetric displacements along v.
    auto quadratic = [&](const ParamVector& v) {
        double acc = 0.0;
        for (double sign : {1.0, -1.0}) {
            const QuantumState there = evolve(rho0, channel_unitary(family, phi + sign * delta * v));
            acc += 8.0 * (1.0 - root_fidelity(here, there)) / (delta * delta);
        }
        return 0.5 * acc;
    };

    const int d = family.n_params;
    Eigen::MatrixXd out(d, d);
    for (int m = 0; m < d; ++m) {
        out(m, m) = quadratic(ParamVector::Unit(d, m));
    }
    for (int m = 0; m < d; ++m) {
        for (int n = m + 1; n < d; ++n) {
            const ParamVector plus = ParamVector::Unit(d, m) + ParamVector::Unit(d, n);
            const ParamVector minus = ParamVector::Unit(d, m) - ParamVector::Unit(d, n);
            out(m, n) = out(n, m) = 0.25 * (quadratic(plus) - quadratic(minus));
        }
    }
    return InfoMatrix{out, InfoKind::Quantum};
}

} // namespace gridqfi
