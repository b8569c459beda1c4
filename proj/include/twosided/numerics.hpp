#ifndef TWOSIDED_NUMERICS_HPP
#define TWOSIDED_NUMERICS_HPP

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace twosided {

// Raised for numerical breakdowns: non-finite states, singular systems,
// convergence gate exhaustion, invariant violations during evolution.
class numerical_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct StepperConfig
{
    double dt = 1e-2;
    std::size_t max_steps = 50'000'000;
    double convergence_tol = 1e-10;
    int halving_limit = 8;
    // When false a single pass at `dt` is returned.
    bool convergence_gate = true;
    // Store every `stride`-th step (the final step is always stored).
    std::size_t stride = 1;

    void validate() const;
};

// Time series produced by the integrators. `times` is strictly increasing and
// has the same length as `states`.
template <typename State>
struct Trajectory
{
    std::vector<double> times;
    std::vector<State> states;
    std::map<std::string, double> metadata;

    std::size_t size() const { return times.size(); }
    const State &initial_state() const { return states.front(); }
    const State &final_state() const { return states.back(); }
};

// State-space hooks used by rk4_integrate. Overloads for the Eigen types the
// models use live here so they are visible at template definition.
inline bool all_finite(double x) { return std::isfinite(x); }
inline bool all_finite(std::complex<double> z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}
inline bool all_finite(const Eigen::VectorXd &v) { return v.allFinite(); }
inline bool all_finite(const Eigen::MatrixXcd &m) { return m.allFinite(); }

inline double max_abs_diff(double a, double b) { return std::abs(a - b); }
inline double max_abs_diff(std::complex<double> a, std::complex<double> b)
{
    return std::abs(a - b);
}
inline double max_abs_diff(const Eigen::VectorXd &a, const Eigen::VectorXd &b)
{
    return (a - b).cwiseAbs().maxCoeff();
}
inline double max_abs_diff(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

template <typename S>
concept StepState = std::copy_constructible<S> && requires(const S &a, const S &b, double h) {
    S(a + b);
    S(h * a);
    { all_finite(a) } -> std::convertible_to<bool>;
    { max_abs_diff(a, b) } -> std::convertible_to<double>;
};

namespace detail {

std::size_t step_count(double duration, double dt, std::size_t max_steps);

template <StepState State, typename Rhs>
Trajectory<State> rk4_pass(const Rhs &rhs, const State &y0, double duration, double dt,
                           std::size_t stride, std::size_t max_steps)
{
    const std::size_t steps = step_count(duration, dt, max_steps);
    const double h = steps == 0 ? 0.0 : duration / static_cast<double>(steps);

    Trajectory<State> traj;
    traj.times.reserve(steps / stride + 2);
    traj.states.reserve(steps / stride + 2);
    traj.times.push_back(0.0);
    traj.states.push_back(y0);

    State y = y0;
    for (std::size_t i = 1; i <= steps; ++i) {
        const State k1 = rhs(y);
        const State k2 = rhs(State(y + (0.5 * h) * k1));
        const State k3 = rhs(State(y + (0.5 * h) * k2));
        const State k4 = rhs(State(y + h * k3));
        y = State(y + (h / 6.0) * State(k1 + 2.0 * k2 + 2.0 * k3 + k4));

        if (!all_finite(y)) {
            std::ostringstream msg;
            msg << "non-finite state at step " << i << " (t = " << static_cast<double>(i) * h
                << ", dt = " << h << ")";
            throw numerical_error(msg.str());
        }
        if (i % stride == 0 || i == steps) {
            traj.times.push_back(static_cast<double>(i) * h);
            traj.states.push_back(y);
        }
    }
    traj.metadata["dt"] = h;
    traj.metadata["steps"] = static_cast<double>(steps);
    return traj;
}

} // namespace detail

// Classical fixed-step fourth-order Runge-Kutta. With the convergence gate
// enabled the step is halved until two successive final states agree to
// cfg.convergence_tol; the finer trajectory is returned. Stored time stamps
// stay on the grid of the initial step, so trajectories produced by
// different gate depths are pointwise comparable.
template <StepState State, typename Rhs>
Trajectory<State> rk4_integrate(const Rhs &rhs, const State &y0, double duration,
                                const StepperConfig &cfg)
{
    cfg.validate();
    if (!(duration >= 0.0) || !std::isfinite(duration))
        throw std::invalid_argument("rk4_integrate: duration must be finite and >= 0");
    if (!all_finite(y0))
        throw numerical_error("rk4_integrate: non-finite initial state");

    Trajectory<State> coarse =
        detail::rk4_pass(rhs, y0, duration, cfg.dt, cfg.stride, cfg.max_steps);
    coarse.metadata["halvings"] = 0.0;
    if (!cfg.convergence_gate || duration == 0.0)
        return coarse;

    double last_change = 0.0;
    for (int halving = 1; halving <= cfg.halving_limit; ++halving) {
        const double factor = std::ldexp(1.0, halving);
        Trajectory<State> fine = detail::rk4_pass(rhs, y0, duration, cfg.dt / factor,
                                                  cfg.stride * static_cast<std::size_t>(factor),
                                                  cfg.max_steps);
        last_change = max_abs_diff(coarse.final_state(), fine.final_state());
        fine.metadata["halvings"] = halving;
        fine.metadata["gate_change"] = last_change;
        if (last_change < cfg.convergence_tol)
            return fine;
        coarse = std::move(fine);
    }
    std::ostringstream msg;
    msg << "rk4_integrate: convergence gate not met after " << cfg.halving_limit
        << " halvings (last final-state change " << last_change << ", tolerance "
        << cfg.convergence_tol << ", initial dt " << cfg.dt << ")";
    throw numerical_error(msg.str());
}

// Gaussian elimination with partial pivoting for small (k <= 16) systems.
// Throws numerical_error("no unique stationary state") when a pivot falls
// below 1e-13 * max|A|.
Eigen::VectorXd dense_solve(const Eigen::MatrixXd &A, const Eigen::VectorXd &b);

// Phase split as phi = multiple * pi + residual with |residual| <= pi/2.
// Residuals below 1e-12 are snapped to exactly zero.
struct ReducedPhase
{
    double residual = 0.0;
    bool odd_multiple = false;
};

ReducedPhase reduce_phase(double phi);

// sin(phi) evaluated through reduce_phase: exact zero on (snapped) multiples of pi.
double reduced_sin(double phi);

// exp(i * phi) evaluated through reduce_phase.
std::complex<double> reduced_unit_phasor(double phi);

// n evenly spaced points from start to stop inclusive (n == 1 gives {start}).
std::vector<double> linspace(double start, double stop, std::size_t n);

} // namespace twosided

#endif // TWOSIDED_NUMERICS_HPP
