#include "twosided/lindblad.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace twosided {

namespace {

using cd = std::complex<double>;
constexpr cd I_unit{0.0, 1.0};

ComplexMatrix ladder(int n_max)
{
    ComplexMatrix a = ComplexMatrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ComplexMatrix kron(const ComplexMatrix &A, const ComplexMatrix &B)
{
    ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

// Tr(A rho) without forming the product.
cd trace_product(const ComplexMatrix &A, const ComplexMatrix &rho)
{
    return A.transpose().cwiseProduct(rho).sum();
}

void check_dimension(const ComplexMatrix &rho, const FockSpace &space, const char *where)
{
    if (rho.rows() != space.dimension() || rho.cols() != space.dimension()) {
        std::ostringstream msg;
        msg << where << ": density matrix is " << rho.rows() << "x" << rho.cols()
            << ", space dimension is " << space.dimension();
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

FockSpace::FockSpace(int n_max, int mode_count) : n_max_(n_max), mode_count_(mode_count)
{
    if (n_max < 1)
        throw std::invalid_argument("FockSpace: n_max must be >= 1");
    if (mode_count != 1 && mode_count != 2)
        throw std::invalid_argument("FockSpace: mode_count must be 1 or 2");

    const ComplexMatrix a = ladder(n_max);
    const ComplexMatrix id = ComplexMatrix::Identity(n_max + 1, n_max + 1);
    if (mode_count == 1) {
        annihilators_ = {a};
    } else {
        annihilators_ = {kron(a, id), kron(id, a)};
    }
    for (const auto &op : annihilators_) {
        creators_.push_back(op.adjoint());
        numbers_.push_back(op.adjoint() * op);
    }
    dimension_ = annihilators_.front().rows();
    identity_ = ComplexMatrix::Identity(dimension_, dimension_);
    if (mode_count == 2)
        correlation_ = I_unit * (annihilators_[0] * creators_[1] - creators_[0] * annihilators_[1]);
}

int FockSpace::two_mode_index(Mode m) const
{
    if (mode_count_ != 2)
        throw std::logic_error("FockSpace: left/right operators need a two-mode space");
    return static_cast<int>(m);
}

const ComplexMatrix &FockSpace::c() const
{
    if (mode_count_ != 1)
        throw std::logic_error("FockSpace: c() needs a single-mode space");
    return annihilators_.front();
}

const ComplexMatrix &FockSpace::correlation() const
{
    if (mode_count_ != 2)
        throw std::logic_error("FockSpace: correlation() needs a two-mode space");
    return correlation_;
}

Eigen::Index FockSpace::basis_index(int n_left, int n_right) const
{
    if (mode_count_ != 2)
        throw std::logic_error("FockSpace: two occupation numbers need a two-mode space");
    if (n_left < 0 || n_left > n_max_ || n_right < 0 || n_right > n_max_)
        throw std::out_of_range("FockSpace: occupation number outside the truncated space");
    return static_cast<Eigen::Index>(n_left) * (n_max_ + 1) + n_right;
}

Eigen::Index FockSpace::basis_index(int n) const
{
    if (mode_count_ != 1)
        throw std::logic_error("FockSpace: a single occupation number needs a single-mode space");
    if (n < 0 || n > n_max_)
        throw std::out_of_range("FockSpace: occupation number outside the truncated space");
    return n;
}

ComplexMatrix FockSpace::vacuum() const
{
    ComplexMatrix rho = ComplexMatrix::Zero(dimension_, dimension_);
    rho(0, 0) = 1.0;
    return rho;
}

ComplexMatrix FockSpace::fock_state(int n_left, int n_right) const
{
    ComplexMatrix rho = ComplexMatrix::Zero(dimension_, dimension_);
    const Eigen::Index k = basis_index(n_left, n_right);
    rho(k, k) = 1.0;
    return rho;
}

ComplexMatrix FockSpace::fock_state(int n) const
{
    ComplexMatrix rho = ComplexMatrix::Zero(dimension_, dimension_);
    const Eigen::Index k = basis_index(n);
    rho(k, k) = 1.0;
    return rho;
}

DensityDiagnostics DensityMatrix::diagnostics() const
{
    DensityDiagnostics d;
    d.trace_error = std::abs(rho.trace() - cd(1.0, 0.0));
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

InteractionHamiltonian interaction_hamiltonian(const FockSpace &space, double Omega, double J)
{
    if (space.mode_count() != 2)
        throw std::invalid_argument("interaction_hamiltonian: two-mode space required");
    const ComplexMatrix &aL = space.a(Mode::left);
    const ComplexMatrix &aR = space.a(Mode::right);
    const ComplexMatrix &aLd = space.a_dag(Mode::left);
    const ComplexMatrix &aRd = space.a_dag(Mode::right);
    ComplexMatrix H = 0.5 * Omega * (aR + aRd) + 0.5 * J * (aLd * aR + aRd * aL);
    return {std::move(H), Omega, J};
}

ComplexMatrix single_mode_hamiltonian(const FockSpace &space, double Omega, double Delta)
{
    if (space.mode_count() != 1)
        throw std::invalid_argument("single_mode_hamiltonian: single-mode space required");
    const ComplexMatrix &c = space.c();
    return 0.5 * Omega * (c + c.adjoint()) + Delta * space.number(0);
}

LindbladGenerator::Entries LindbladGenerator::Entries::of(const ComplexMatrix &m)
{
    Entries e;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != cd(0.0, 0.0)) {
                e.rows.push_back(i);
                e.cols.push_back(j);
                e.values.push_back(m(i, j));
            }
    return e;
}

void LindbladGenerator::Entries::add_left_product(cd scale, const ComplexMatrix &x,
                                                  ComplexMatrix &out) const
{
    // (op x)(r, :) += op(r, c) x(c, :)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const cd *xc = x.col(j).data();
        cd *oc = out.col(j).data();
        for (std::size_t k = 0; k < values.size(); ++k)
            oc[rows[k]] += scale * values[k] * xc[cols[k]];
    }
}

void LindbladGenerator::Entries::add_right_product(cd scale, const ComplexMatrix &x,
                                                   ComplexMatrix &out) const
{
    // (x op)(:, c) += x(:, r) op(r, c)
    for (std::size_t k = 0; k < values.size(); ++k)
        out.col(cols[k]) += (scale * values[k]) * x.col(rows[k]);
}

LindbladGenerator::LindbladGenerator(const FockSpace &space, ComplexMatrix hamiltonian, double kappa)
    : dimension_(space.dimension()), kappa_(kappa)
{
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument("LindbladGenerator: kappa must be finite and >= 0");
    if (hamiltonian.rows() != space.dimension() || hamiltonian.cols() != space.dimension())
        throw std::invalid_argument("LindbladGenerator: Hamiltonian does not match the space");
    ComplexMatrix effective = std::move(hamiltonian);
    for (int mode = 0; mode < space.mode_count(); ++mode) {
        jumps_.push_back(Entries::of(space.annihilation(mode)));
        jumps_dag_.push_back(Entries::of(space.creation(mode)));
        effective -= I_unit * (0.5 * kappa) * space.number(mode);
    }
    effective_ = Entries::of(effective);
    effective_adj_ = Entries::of(effective.adjoint());
}

ComplexMatrix LindbladGenerator::operator()(const ComplexMatrix &rho) const
{
    if (rho.rows() != dimension() || rho.cols() != dimension())
        throw std::invalid_argument("LindbladGenerator: density matrix dimension mismatch");
    // -i (H_eff rho - rho H_eff^dag) + kappa sum L rho L^dag
    ComplexMatrix out = ComplexMatrix::Zero(dimension(), dimension());
    effective_.add_left_product(-I_unit, rho, out);
    effective_adj_.add_right_product(I_unit, rho, out);
    ComplexMatrix tmp(dimension(), dimension());
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        tmp.setZero();
        jumps_dag_[k].add_right_product(1.0, rho, tmp);
        jumps_[k].add_left_product(kappa_, tmp, out);
    }
    return out;
}

ComplexMatrix lindblad_rhs(const ComplexMatrix &rho, const FockSpace &space,
                           const InteractionHamiltonian &H, double kappa)
{
    if (space.mode_count() != 2)
        throw std::invalid_argument("lindblad_rhs: two-mode space required");
    check_dimension(rho, space, "lindblad_rhs");
    return LindbladGenerator(space, H.H, kappa)(rho);
}

ComplexMatrix single_mode_lindblad_rhs(const ComplexMatrix &rho, const FockSpace &space,
                                       double Omega, double Delta, double kappa)
{
    if (space.mode_count() != 1)
        throw std::invalid_argument("single_mode_lindblad_rhs: single-mode space required");
    check_dimension(rho, space, "single_mode_lindblad_rhs");
    return LindbladGenerator(space, single_mode_hamiltonian(space, Omega, Delta), kappa)(rho);
}

Trajectory<ComplexMatrix> evolve_density(const ComplexMatrix &rho0, const LindbladGenerator &generator,
                                         double duration, const StepperConfig &cfg,
                                         const DensityEvolutionOptions &opts)
{
    if (rho0.rows() != generator.dimension() || rho0.cols() != generator.dimension())
        throw std::invalid_argument("evolve_density: rho0 does not match the generator");
    auto traj = rk4_integrate(generator, rho0, duration, cfg);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        DensityMatrix dm{traj.states[i], traj.times[i]};
        DensityDiagnostics d;
        d.trace_error = std::abs(dm.rho.trace() - cd(1.0, 0.0));
        d.hermiticity_error = (dm.rho - dm.rho.adjoint()).cwiseAbs().maxCoeff();
        if (opts.check_positivity)
            d.min_eigenvalue = dm.diagnostics().min_eigenvalue;
        const bool bad = d.trace_error > opts.trace_tol || d.hermiticity_error > opts.hermiticity_tol
                         || (opts.check_positivity && d.min_eigenvalue < -opts.positivity_tol);
        if (bad) {
            std::ostringstream msg;
            msg << "evolve_density: invariant violated at stored step " << i << " (t = " << dm.time
                << "): trace error " << d.trace_error << ", hermiticity error "
                << d.hermiticity_error << ", min eigenvalue " << d.min_eigenvalue;
            throw numerical_error(msg.str());
        }
    }
    traj.metadata["kappa"] = generator.kappa();
    return traj;
}

Expectations expectations(const ComplexMatrix &rho, const FockSpace &space, double kappa)
{
    if (space.mode_count() != 2)
        throw std::invalid_argument("expectations: two-mode space required");
    check_dimension(rho, space, "expectations");
    if (!(kappa >= 0.0))
        throw std::invalid_argument("expectations: kappa must be >= 0");

    const ComplexMatrix &aL = space.a(Mode::left);
    const ComplexMatrix &aR = space.a(Mode::right);
    const cd nL = trace_product(space.n(Mode::left), rho);
    const cd nR = trace_product(space.n(Mode::right), rho);
    const cd alpha = trace_product(aL, rho);
    const cd alpha_dag = trace_product(space.a_dag(Mode::left), rho);
    const cd beta = trace_product(aR, rho);
    const cd beta_dag = trace_product(space.a_dag(Mode::right), rho);
    const cd k1 = alpha + alpha_dag;
    const cd k2 = I_unit * (beta - beta_dag);
    const cd k3 = trace_product(space.correlation(), rho);

    Expectations out;
    out.state = {nL.real(), nR.real(), k1.real(), k2.real(), k3.real()};
    out.rates = emission_rates(out.state, kappa);
    for (const cd &z : {nL, nR, k1, k2, k3})
        out.max_imaginary_residue = std::max(out.max_imaginary_residue, std::abs(z.imag()));
    return out;
}

SingleModeExpectations single_mode_expectations(const ComplexMatrix &rho, const FockSpace &space,
                                                double kappa)
{
    if (space.mode_count() != 1)
        throw std::invalid_argument("single_mode_expectations: single-mode space required");
    check_dimension(rho, space, "single_mode_expectations");
    const cd n = trace_product(space.number(0), rho);
    const cd gamma = trace_product(space.c(), rho);
    const cd gamma_dag = trace_product(space.creation(0), rho);
    const cd k1 = gamma + gamma_dag;
    const cd k2 = I_unit * (gamma - gamma_dag);

    SingleModeExpectations out;
    out.state = {n.real(), k1.real(), k2.real()};
    out.emission_rate = kappa * n.real();
    for (const cd &z : {n, k1, k2})
        out.max_imaginary_residue = std::max(out.max_imaginary_residue, std::abs(z.imag()));
    return out;
}

SinglePhotonSpectrum single_photon_spectrum(double omega, double J)
{
    const FockSpace space(1, 2);
    const ComplexMatrix H_field = omega * (space.n(Mode::left) + space.n(Mode::right));
    const ComplexMatrix H_coup =
        0.5 * J
        * (space.a_dag(Mode::left) * space.a(Mode::right)
           + space.a_dag(Mode::right) * space.a(Mode::left));
    const ComplexMatrix H = H_field + H_coup;

    const Eigen::Index iL = space.basis_index(1, 0);
    const Eigen::Index iR = space.basis_index(0, 1);
    Eigen::Matrix2d block;
    block << H(iL, iL).real(), H(iL, iR).real(), H(iR, iL).real(), H(iR, iR).real();

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(block);
    const Eigen::Vector2d values = solver.eigenvalues();
    Eigen::Matrix2d vectors = solver.eigenvectors();
    for (int k = 0; k < 2; ++k)
        if (vectors(0, k) < 0.0 || (vectors(0, k) == 0.0 && vectors(1, k) < 0.0))
            vectors.col(k) = -vectors.col(k);

    SinglePhotonSpectrum out;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (values(0) == values(1)) {
        // Degenerate block: any basis diagonalises it; report the standing waves.
        out.plus = out.minus = values(0);
        out.plus_vector = Eigen::Vector2d(inv_sqrt2, inv_sqrt2);
        out.minus_vector = Eigen::Vector2d(inv_sqrt2, -inv_sqrt2);
        return out;
    }
    // The symmetric combination has same-sign components.
    const int sym = vectors(0, 0) * vectors(1, 0) > 0.0 ? 0 : 1;
    out.plus = values(sym);
    out.minus = values(1 - sym);
    out.plus_vector = vectors.col(sym);
    out.minus_vector = vectors.col(1 - sym);
    return out;
}

int recommended_cutoff(double mean_photon_number)
{
    if (!(mean_photon_number >= 0.0) || !std::isfinite(mean_photon_number))
        throw std::invalid_argument("recommended_cutoff: mean photon number must be finite and >= 0");
    const double mu = mean_photon_number;
    return static_cast<int>(std::ceil(mu + 6.0 * std::sqrt(std::max(mu, 1.0)) + 4.0));
}

} // namespace twosided
