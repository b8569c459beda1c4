#ifndef TWOSIDED_LINDBLAD_HPP
#define TWOSIDED_LINDBLAD_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "twosided/numerics.hpp"
#include "twosided/rate_dynamics.hpp"

namespace twosided {

using ComplexMatrix = Eigen::MatrixXcd;

enum class Mode { left = 0, right = 1 };

// Truncated Fock space of one or two bosonic modes, each holding at most
// n_max photons. Two-mode basis states |n_L, n_R> are ordered
// lexicographically: index = n_L * (n_max + 1) + n_R.
class FockSpace
{
public:
    FockSpace(int n_max, int mode_count);

    int n_max() const { return n_max_; }
    int mode_count() const { return mode_count_; }
    Eigen::Index dimension() const { return dimension_; }

    // Mode 0 is the single mode c, or a_L; mode 1 is a_R.
    const ComplexMatrix &annihilation(int mode) const { return annihilators_.at(mode); }
    const ComplexMatrix &creation(int mode) const { return creators_.at(mode); }
    const ComplexMatrix &number(int mode) const { return numbers_.at(mode); }
    const ComplexMatrix &identity() const { return identity_; }

    const ComplexMatrix &a(Mode m) const { return annihilation(two_mode_index(m)); }
    const ComplexMatrix &a_dag(Mode m) const { return creation(two_mode_index(m)); }
    const ComplexMatrix &n(Mode m) const { return number(two_mode_index(m)); }

    // Single-mode operator c.
    const ComplexMatrix &c() const;

    // i (aL aR^dag - aL^dag aR), the operator behind k3 (two-mode only).
    const ComplexMatrix &correlation() const;

    Eigen::Index basis_index(int n_left, int n_right) const;
    Eigen::Index basis_index(int n) const;

    ComplexMatrix vacuum() const;
    // |n_L, n_R><n_L, n_R|
    ComplexMatrix fock_state(int n_left, int n_right) const;
    // |n><n| (single mode)
    ComplexMatrix fock_state(int n) const;

private:
    int two_mode_index(Mode m) const;

    int n_max_;
    int mode_count_;
    Eigen::Index dimension_;
    std::vector<ComplexMatrix> annihilators_;
    std::vector<ComplexMatrix> creators_;
    std::vector<ComplexMatrix> numbers_;
    ComplexMatrix identity_;
    ComplexMatrix correlation_;
};

// Checks used on stored density matrices.
struct DensityDiagnostics
{
    double trace_error = 0.0;        // |Tr rho - 1|
    double hermiticity_error = 0.0;  // max |rho - rho^dag|
    double min_eigenvalue = 0.0;
};

struct DensityMatrix
{
    ComplexMatrix rho;
    double time = 0.0;

    DensityDiagnostics diagnostics() const;
};

struct InteractionHamiltonian
{
    ComplexMatrix H;
    double Omega = 0.0;
    double J = 0.0;
};

// H_I = Omega/2 (aR + aR^dag) + J/2 (aL^dag aR + aR^dag aL); two-mode spaces only.
InteractionHamiltonian interaction_hamiltonian(const FockSpace &space, double Omega, double J);

// H_I = Omega/2 (c + c^dag) + Delta c^dag c; single-mode spaces only.
ComplexMatrix single_mode_hamiltonian(const FockSpace &space, double Omega, double Delta);

// Lindblad generator: rho' = -i[H, rho] + kappa sum_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)
// with one channel per mode of the space, all at the same kappa. The operators
// are stored compressed: each row of a ladder or Hamiltonian matrix holds only
// a handful of entries, so applying them costs O(nnz * dim), not O(dim^3).
class LindbladGenerator
{
public:
    LindbladGenerator(const FockSpace &space, ComplexMatrix hamiltonian, double kappa);

    ComplexMatrix operator()(const ComplexMatrix &rho) const;

    Eigen::Index dimension() const { return dimension_; }
    double kappa() const { return kappa_; }

private:
    // Nonzero entries of an operator matrix.
    struct Entries
    {
        std::vector<Eigen::Index> rows;
        std::vector<Eigen::Index> cols;
        std::vector<std::complex<double>> values;

        static Entries of(const ComplexMatrix &m);
        // out += scale * (op * x)
        void add_left_product(std::complex<double> scale, const ComplexMatrix &x, ComplexMatrix &out) const;
        // out += scale * (x * op)
        void add_right_product(std::complex<double> scale, const ComplexMatrix &x, ComplexMatrix &out) const;
    };

    Entries effective_;     // H - i kappa/2 sum L^dag L
    Entries effective_adj_;
    std::vector<Entries> jumps_;
    std::vector<Entries> jumps_dag_;
    Eigen::Index dimension_;
    double kappa_;
};

ComplexMatrix lindblad_rhs(const ComplexMatrix &rho, const FockSpace &space,
                           const InteractionHamiltonian &H, double kappa);

ComplexMatrix single_mode_lindblad_rhs(const ComplexMatrix &rho, const FockSpace &space,
                                       double Omega, double Delta, double kappa);

struct DensityEvolutionOptions
{
    double trace_tol = 1e-10;
    double hermiticity_tol = 1e-12;
    // RK4 is not positivity preserving: eigenvalues near zero pick up O(dt^5)
    // negative excursions, so the floor sits well above that scale.
    double positivity_tol = 1e-8;
    bool check_positivity = true;
};

// RK4 evolution of rho0. Every stored state is checked against the density
// matrix invariants; a violation raises numerical_error naming the step.
Trajectory<ComplexMatrix> evolve_density(const ComplexMatrix &rho0, const LindbladGenerator &generator,
                                         double duration, const StepperConfig &cfg,
                                         const DensityEvolutionOptions &opts = {});

struct Expectations
{
    RateState5 state;
    EmissionRates rates;
    double max_imaginary_residue = 0.0;
};

// Moments of a two-mode rho as traces against their defining operators.
Expectations expectations(const ComplexMatrix &rho, const FockSpace &space, double kappa);

struct SingleModeExpectations
{
    SingleModeState state;
    double emission_rate = 0.0;
    double max_imaginary_residue = 0.0;
};

SingleModeExpectations single_mode_expectations(const ComplexMatrix &rho, const FockSpace &space,
                                                double kappa);

// One-photon spectrum of H_field + H_coup at frequency omega, obtained by
// diagonalising the {|1,0>, |0,1>} block. `plus` belongs to the standing
// wave (|L> + |R>)/sqrt(2), `minus` to (|L> - |R>)/sqrt(2).
struct SinglePhotonSpectrum
{
    double plus = 0.0;
    double minus = 0.0;
    Eigen::Vector2d plus_vector;
    Eigen::Vector2d minus_vector;
};

SinglePhotonSpectrum single_photon_spectrum(double omega, double J);

// ceil(mu + 6 sqrt(max(mu, 1)) + 4)
int recommended_cutoff(double mean_photon_number);

} // namespace twosided

#endif // TWOSIDED_LINDBLAD_HPP
