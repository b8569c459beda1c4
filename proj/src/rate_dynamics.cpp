#include "twosided/rate_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twosided {

RateState5 operator+(const RateState5 &a, const RateState5 &b)
{
    return {a.n_L + b.n_L, a.n_R + b.n_R, a.k1 + b.k1, a.k2 + b.k2, a.k3 + b.k3};
}

RateState5 operator*(double s, const RateState5 &a)
{
    return {s * a.n_L, s * a.n_R, s * a.k1, s * a.k2, s * a.k3};
}

bool all_finite(const RateState5 &s)
{
    const auto v = s.as_array();
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs_diff(const RateState5 &a, const RateState5 &b)
{
    const auto va = a.as_array();
    const auto vb = b.as_array();
    double m = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i)
        m = std::max(m, std::abs(va[i] - vb[i]));
    return m;
}

SingleModeState operator+(const SingleModeState &a, const SingleModeState &b)
{
    return {a.n + b.n, a.k1 + b.k1, a.k2 + b.k2};
}

SingleModeState operator*(double s, const SingleModeState &a)
{
    return {s * a.n, s * a.k1, s * a.k2};
}

bool all_finite(const SingleModeState &s)
{
    return std::isfinite(s.n) && std::isfinite(s.k1) && std::isfinite(s.k2);
}

double max_abs_diff(const SingleModeState &a, const SingleModeState &b)
{
    return std::max({std::abs(a.n - b.n), std::abs(a.k1 - b.k1), std::abs(a.k2 - b.k2)});
}

RateState5 traveling_rhs(const RateState5 &s, const TravelingWaveParams &p)
{
    const double J = p.coupling_J;
    const double kappa = p.kappa;
    const double Omega = p.rabi_Omega;
    RateState5 d;
    d.n_L = 0.5 * J * s.k3 - kappa * s.n_L;
    d.n_R = 0.5 * Omega * s.k2 - 0.5 * J * s.k3 - kappa * s.n_R;
    d.k1 = -0.5 * J * s.k2 - 0.5 * kappa * s.k1;
    d.k2 = Omega + 0.5 * J * s.k1 - 0.5 * kappa * s.k2;
    // The drive enters the correlation through Omega/2, as it does in H_I.
    d.k3 = -0.5 * Omega * s.k1 - J * (s.n_L - s.n_R) - kappa * s.k3;
    return d;
}

SingleModeState single_mode_rhs(const SingleModeState &s, double Omega, double Delta, double kappa)
{
    return {0.5 * Omega * s.k2 - kappa * s.n, -Delta * s.k2 - 0.5 * kappa * s.k1,
            Omega + Delta * s.k1 - 0.5 * kappa * s.k2};
}

SingleModeState reduced_total_rhs(double n_tot, double k1, double k2, double Omega, double Delta,
                                  double kappa)
{
    return {0.5 * Omega * k2 - kappa * n_tot, -Delta * k2 - 0.5 * kappa * k1,
            Omega + Delta * k1 - 0.5 * kappa * k2};
}

double default_step(double Omega, double Delta, double kappa)
{
    return 0.01 / std::max({std::abs(kappa), std::abs(Omega), std::abs(Delta), 1.0});
}

double default_step(const TravelingWaveParams &p)
{
    return 0.01
           / std::max({std::abs(p.kappa), std::abs(p.coupling_J), std::abs(p.rabi_Omega),
                       std::abs(p.detuning_Delta), 1.0});
}

Trajectory<RateState5> evolve_traveling(const TravelingWaveParams &p, const RateState5 &s0,
                                        double duration, const StepperConfig &cfg)
{
    p.validate();
    auto traj = evolve([&p](const RateState5 &s) { return traveling_rhs(s, p); }, s0, duration, cfg);
    traj.metadata["kappa"] = p.kappa;
    traj.metadata["J"] = p.coupling_J;
    traj.metadata["Omega"] = p.rabi_Omega;
    return traj;
}

Trajectory<SingleModeState> evolve_single_mode(double Omega, double Delta, double kappa,
                                               const SingleModeState &s0, double duration,
                                               const StepperConfig &cfg)
{
    auto traj = evolve(
        [=](const SingleModeState &s) { return single_mode_rhs(s, Omega, Delta, kappa); }, s0,
        duration, cfg);
    traj.metadata["kappa"] = kappa;
    traj.metadata["Omega"] = Omega;
    traj.metadata["Delta"] = Delta;
    return traj;
}

Trajectory<SingleModeState> evolve_reduced_total(double Omega, double Delta, double kappa,
                                                 const SingleModeState &s0, double duration,
                                                 const StepperConfig &cfg)
{
    auto traj = evolve(
        [=](const SingleModeState &s) {
            return reduced_total_rhs(s.n, s.k1, s.k2, Omega, Delta, kappa);
        },
        s0, duration, cfg);
    traj.metadata["kappa"] = kappa;
    traj.metadata["Omega"] = Omega;
    traj.metadata["Delta"] = Delta;
    return traj;
}

namespace {

void require_damping(double kappa, const char *where)
{
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument(std::string(where) + ": kappa must be finite and >= 0");
    if (kappa == 0.0)
        throw numerical_error(std::string(where) + ": no stationary state (kappa = 0)");
}

double state_scale(const std::array<double, 5> &v)
{
    double m = 1.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

RateState5 traveling_steady_state_linear_solve(const TravelingWaveParams &p)
{
    p.validate();
    require_damping(p.kappa, "traveling_steady_state");
    // rhs(s) = A s + b: recover A and b from the equations of motion themselves.
    const RateState5 offset = traveling_rhs(RateState5{}, p);
    Eigen::MatrixXd A(5, 5);
    Eigen::VectorXd b(5);
    const auto off = offset.as_array();
    for (int j = 0; j < 5; ++j) {
        std::array<double, 5> unit{};
        unit[j] = 1.0;
        const auto col = traveling_rhs(RateState5::from_array(unit), p).as_array();
        for (int i = 0; i < 5; ++i)
            A(i, j) = col[i] - off[i];
    }
    for (int i = 0; i < 5; ++i)
        b(i) = -off[i];
    const Eigen::VectorXd x = dense_solve(A, b);
    return {x(0), x(1), x(2), x(3), x(4)};
}

RateState5 traveling_steady_state(const TravelingWaveParams &p)
{
    p.validate();
    require_damping(p.kappa, "traveling_steady_state");
    const double J = p.coupling_J;
    const double kappa = p.kappa;
    const double Omega = p.rabi_Omega;
    const double D = J * J + kappa * kappa;
    const double D2 = D * D;

    RateState5 s;
    s.n_L = Omega * Omega * J * J / D2;
    s.n_R = Omega * Omega * kappa * kappa / D2;
    s.k1 = -2.0 * Omega * J / D;
    s.k2 = 2.0 * Omega * kappa / D;
    s.k3 = 2.0 * kappa * Omega * Omega * J / D2;

    const RateState5 solved = traveling_steady_state_linear_solve(p);
    const double dev = max_abs_diff(s, solved);
    if (dev > 1e-12 * state_scale(s.as_array())) {
        std::ostringstream msg;
        msg << "traveling_steady_state: closed form and linear solve disagree by " << dev;
        throw numerical_error(msg.str());
    }
    return s;
}

EmissionRates emission_rates(const RateState5 &s, double kappa)
{
    if (!(kappa >= 0.0))
        throw std::invalid_argument("emission_rates: kappa must be >= 0");
    const double I_L = kappa * s.n_L;
    const double I_R = kappa * s.n_R;
    return {I_L, I_R, I_L + I_R};
}

EmissionRates steady_emission_split(const TravelingWaveParams &p)
{
    p.validate();
    require_damping(p.kappa, "steady_emission_split");
    const double J = p.coupling_J;
    const double kappa = p.kappa;
    const double O2 = p.rabi_Omega * p.rabi_Omega;
    const double D = J * J + kappa * kappa;
    const double I_L = O2 * J * J * kappa / (D * D);
    const double I_R = O2 * kappa * kappa * kappa / (D * D);
    return {I_L, I_R, I_L + I_R};
}

SingleModeSteady single_mode_steady(double Omega, double Delta, double kappa)
{
    require_damping(kappa, "single_mode_steady");
    const double D = 4.0 * Delta * Delta + kappa * kappa;
    SingleModeSteady out;
    out.state = {Omega * Omega / D, -4.0 * Omega * Delta / D, 2.0 * Omega * kappa / D};
    out.emission_rate = Omega * Omega * kappa / D;

    const SingleModeState solved = single_mode_steady_linear_solve(Omega, Delta, kappa);
    const double scale = std::max({1.0, std::abs(out.state.n), std::abs(out.state.k1),
                                   std::abs(out.state.k2)});
    const double dev = max_abs_diff(out.state, solved);
    if (dev > 1e-12 * scale) {
        std::ostringstream msg;
        msg << "single_mode_steady: closed form and linear solve disagree by " << dev;
        throw numerical_error(msg.str());
    }
    return out;
}

SingleModeState single_mode_steady_linear_solve(double Omega, double Delta, double kappa)
{
    require_damping(kappa, "single_mode_steady");
    const SingleModeState offset = single_mode_rhs({}, Omega, Delta, kappa);
    const std::array<SingleModeState, 3> units{SingleModeState{1, 0, 0}, SingleModeState{0, 1, 0},
                                               SingleModeState{0, 0, 1}};
    Eigen::MatrixXd A(3, 3);
    for (int j = 0; j < 3; ++j) {
        const SingleModeState col = single_mode_rhs(units[j], Omega, Delta, kappa);
        A(0, j) = col.n - offset.n;
        A(1, j) = col.k1 - offset.k1;
        A(2, j) = col.k2 - offset.k2;
    }
    Eigen::VectorXd b(3);
    b << -offset.n, -offset.k1, -offset.k2;
    const Eigen::VectorXd x = dense_solve(A, b);
    return {x(0), x(1), x(2)};
}

double lorentzian_total_rate(double Omega, double Delta, double kappa)
{
    require_damping(kappa, "lorentzian_total_rate");
    return Omega * Omega * kappa / (4.0 * Delta * Delta + kappa * kappa);
}

} // namespace twosided
