#ifndef TWOSIDED_RATE_DYNAMICS_HPP
#define TWOSIDED_RATE_DYNAMICS_HPP

#include <array>

#include "twosided/cavity_parameters.hpp"
#include "twosided/numerics.hpp"

namespace twosided {

// First moments of the traveling-wave model:
//   n_L = <aL^dag aL>, n_R = <aR^dag aR>, k1 = <aL + aL^dag>,
//   k2 = i<aR - aR^dag>, k3 = i<aL aR^dag - aL^dag aR>.
struct RateState5
{
    double n_L = 0.0;
    double n_R = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;

    double n_tot() const { return n_L + n_R; }
    std::array<double, 5> as_array() const { return {n_L, n_R, k1, k2, k3}; }
    static RateState5 from_array(const std::array<double, 5> &v) { return {v[0], v[1], v[2], v[3], v[4]}; }
};

// Single standing-wave mode: n = <c^dag c>, k1 = <c + c^dag>, k2 = i<c - c^dag>.
struct SingleModeState
{
    double n = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
};

struct EmissionRates
{
    double I_L = 0.0;
    double I_R = 0.0;
    double I_tot = 0.0;
};

RateState5 operator+(const RateState5 &a, const RateState5 &b);
RateState5 operator*(double s, const RateState5 &a);
bool all_finite(const RateState5 &s);
double max_abs_diff(const RateState5 &a, const RateState5 &b);

SingleModeState operator+(const SingleModeState &a, const SingleModeState &b);
SingleModeState operator*(double s, const SingleModeState &a);
bool all_finite(const SingleModeState &s);
double max_abs_diff(const SingleModeState &a, const SingleModeState &b);

// Closed linear equations of motion for the five moments.
RateState5 traveling_rhs(const RateState5 &s, const TravelingWaveParams &p);

// Single-mode moments under H = Omega/2 (c + c^dag) + Delta c^dag c with decay kappa.
SingleModeState single_mode_rhs(const SingleModeState &s, double Omega, double Delta, double kappa);

// Closed (n_tot, k1, k2) system for near-resonant driving; same form as single_mode_rhs.
SingleModeState reduced_total_rhs(double n_tot, double k1, double k2, double Omega, double Delta,
                                  double kappa);

// Default RK4 step: 0.01 / max(kappa, |J|, Omega, |Delta|, 1).
double default_step(const TravelingWaveParams &p);
double default_step(double Omega, double Delta, double kappa);

template <StepState State, typename Rhs>
Trajectory<State> evolve(const Rhs &rhs, const State &s0, double duration, const StepperConfig &cfg)
{
    return rk4_integrate(rhs, s0, duration, cfg);
}

Trajectory<RateState5> evolve_traveling(const TravelingWaveParams &p, const RateState5 &s0,
                                        double duration, const StepperConfig &cfg);
Trajectory<SingleModeState> evolve_single_mode(double Omega, double Delta, double kappa,
                                               const SingleModeState &s0, double duration,
                                               const StepperConfig &cfg);
Trajectory<SingleModeState> evolve_reduced_total(double Omega, double Delta, double kappa,
                                                 const SingleModeState &s0, double duration,
                                                 const StepperConfig &cfg);

// Stationary moments in closed form. Agreement with the dense linear solve
// of the stationarity system is enforced to 1e-12 (relative to the state's
// magnitude); a mismatch raises numerical_error. kappa = 0 has no
// stationary state and raises numerical_error.
RateState5 traveling_steady_state(const TravelingWaveParams &p);

// The same stationary point obtained only from dense_solve.
RateState5 traveling_steady_state_linear_solve(const TravelingWaveParams &p);

EmissionRates emission_rates(const RateState5 &s, double kappa);

// Closed-form stationary emission rates through each mirror.
EmissionRates steady_emission_split(const TravelingWaveParams &p);

struct SingleModeSteady
{
    SingleModeState state;
    double emission_rate = 0.0;
};

SingleModeSteady single_mode_steady(double Omega, double Delta, double kappa);
SingleModeState single_mode_steady_linear_solve(double Omega, double Delta, double kappa);

// I_tot = Omega^2 kappa / (4 Delta^2 + kappa^2)
double lorentzian_total_rate(double Omega, double Delta, double kappa);

} // namespace twosided

#endif // TWOSIDED_RATE_DYNAMICS_HPP
