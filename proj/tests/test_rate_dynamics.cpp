#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "twosided/rate_dynamics.hpp"

using namespace twosided;

namespace {

TravelingWaveParams params(double Omega, double J, double kappa)
{
    TravelingWaveParams p;
    p.rabi_Omega = Omega;
    p.coupling_J = J;
    p.kappa = kappa;
    return p;
}

// Augmented generator [[A, b], [0, 0]] of the affine 5-variable system, written
// out from the equations of motion independently of traveling_rhs.
Eigen::MatrixXd augmented_generator(double Omega, double J, double kappa)
{
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(6, 6);
    // n_L
    M(0, 4) = 0.5 * J;
    M(0, 0) = -kappa;
    // n_R
    M(1, 3) = 0.5 * Omega;
    M(1, 4) = -0.5 * J;
    M(1, 1) = -kappa;
    // k1
    M(2, 3) = -0.5 * J;
    M(2, 2) = -0.5 * kappa;
    // k2
    M(3, 5) = Omega;
    M(3, 2) = 0.5 * J;
    M(3, 3) = -0.5 * kappa;
    // k3
    M(4, 2) = -0.5 * Omega;
    M(4, 0) = -J;
    M(4, 1) = J;
    M(4, 4) = -kappa;
    return M;
}

RateState5 exact_state(double Omega, double J, double kappa, const RateState5 &s0, double t)
{
    Eigen::VectorXd y(6);
    y << s0.n_L, s0.n_R, s0.k1, s0.k2, s0.k3, 1.0;
    const Eigen::MatrixXd E = (augmented_generator(Omega, J, kappa) * t).exp();
    const Eigen::VectorXd out = E * y;
    return {out(0), out(1), out(2), out(3), out(4)};
}

} // namespace

TEST_CASE("traveling_rhs: drive only at the vacuum")
{
    const RateState5 d = traveling_rhs(RateState5{}, params(1.0, 0.7, 0.3));
    CHECK(d.n_L == 0.0);
    CHECK(d.n_R == 0.0);
    CHECK(d.k1 == 0.0);
    CHECK(d.k2 == 1.0);
    CHECK(d.k3 == 0.0);
}

TEST_CASE("traveling_rhs: undriven total population decays at kappa")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const RateState5 s{u(rng), u(rng), 0.0, 0.0, u(rng) - 1.0};
        const double kappa = u(rng) + 0.1;
        const RateState5 d = traveling_rhs(s, params(0.0, u(rng) - 1.0, kappa));
        CHECK(d.n_L + d.n_R == doctest::Approx(-kappa * s.n_tot()).epsilon(1e-14));
    }
}

TEST_CASE("traveling_rhs: J = 0 decouples the left mode")
{
    const RateState5 s{0.0, 0.7, 0.0, 0.4, 0.0};
    const RateState5 d = traveling_rhs(s, params(1.3, 0.0, 0.9));
    CHECK(d.n_L == 0.0);
    const SingleModeState reduced = single_mode_rhs({0.7, 0.0, 0.4}, 1.3, 0.0, 0.9);
    CHECK(d.n_R == reduced.n);
    CHECK(d.k2 == reduced.k2);
}

TEST_CASE("traveling_rhs: matches the independent linear generator")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double Omega = std::abs(u(rng)), J = u(rng), kappa = std::abs(u(rng)) + 0.1;
        const RateState5 s{u(rng), u(rng), u(rng), u(rng), u(rng)};
        Eigen::VectorXd y(6);
        y << s.n_L, s.n_R, s.k1, s.k2, s.k3, 1.0;
        const Eigen::VectorXd expected = augmented_generator(Omega, J, kappa) * y;
        const auto got = traveling_rhs(s, params(Omega, J, kappa)).as_array();
        for (int k = 0; k < 5; ++k)
            CHECK(std::abs(got[k] - expected(k)) < 1e-15);
    }
}

TEST_CASE("evolve_traveling: undriven decay from (1,1,0,0,0)")
{
    const auto traj = evolve_traveling(params(0.0, 0.4, 1.0), {1.0, 1.0, 0.0, 0.0, 0.0}, 1.0, StepperConfig{});
    CHECK(std::abs(traj.final_state().n_tot() - 2.0 * std::exp(-1.0)) < 1e-9);
    CHECK(std::abs(traj.final_state().n_tot() - 0.735759) < 1e-6);
}

TEST_CASE("evolve_traveling: agrees with the matrix exponential")
{
    for (const auto &[Omega, J, kappa] : {std::tuple{1.0, 0.0, 1.0}, std::tuple{1.0, 1.0, 1.0},
                                          std::tuple{0.5, -1.5, 0.7}, std::tuple{2.0, 3.0, 0.2}}) {
        const RateState5 s0{0.2, 0.1, 0.0, -0.3, 0.05};
        const auto traj = evolve_traveling(params(Omega, J, kappa), s0, 5.0, StepperConfig{});
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.size(); i += 25)
            worst = std::max(worst, max_abs_diff(traj.states[i], exact_state(Omega, J, kappa, s0, traj.times[i])));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("evolve_traveling: T = 0 and long-time limit")
{
    const RateState5 s0{0.3, 0.2, 0.1, 0.0, 0.0};
    const auto none = evolve_traveling(params(1.0, 1.0, 1.0), s0, 0.0, StepperConfig{});
    REQUIRE(none.size() == 1);
    CHECK(max_abs_diff(none.final_state(), s0) == 0.0);

    const TravelingWaveParams p = params(1.0, 0.0, 1.0);
    const auto traj = evolve_traveling(p, RateState5{}, 30.0, StepperConfig{});
    CHECK(max_abs_diff(traj.final_state(), traveling_steady_state(p)) < 1e-6);
}

TEST_CASE("steady state: closed forms")
{
    const RateState5 resonant = traveling_steady_state(params(1.0, 0.0, 1.0));
    CHECK(resonant.n_L == 0.0);
    CHECK(resonant.n_R == doctest::Approx(1.0).epsilon(1e-15));

    const RateState5 s = traveling_steady_state(params(1.0, 1.0, 1.0));
    CHECK(s.n_L == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.n_R == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.k1 == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(s.k2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.k3 == doctest::Approx(0.5).epsilon(1e-15));

    const RateState5 dark = traveling_steady_state(params(0.0, 0.4, 1.0));
    CHECK(max_abs_diff(dark, RateState5{}) == 0.0);
}

TEST_CASE("steady state: stationary under the rhs and equal to the dense solve")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const TravelingWaveParams p = params(std::abs(u(rng)), u(rng), std::abs(u(rng)) + 0.05);
        const RateState5 s = traveling_steady_state(p);
        const RateState5 lin = traveling_steady_state_linear_solve(p);
        const double scale = std::max(1.0, std::abs(s.n_R) + std::abs(s.k2));
        CHECK(max_abs_diff(s, lin) <= 1e-12 * scale);
        const auto d = traveling_rhs(s, p).as_array();
        for (double x : d)
            CHECK(std::abs(x) < 1e-12 * scale);
    }
}

TEST_CASE("steady state: no damping has no stationary state")
{
    CHECK_THROWS_AS(traveling_steady_state(params(1.0, 1.0, 0.0)), numerical_error);
    CHECK_THROWS_AS(traveling_steady_state_linear_solve(params(1.0, 1.0, 0.0)), numerical_error);
    CHECK_THROWS_AS(traveling_steady_state(params(1.0, 1.0, -1.0)), std::invalid_argument);
}

TEST_CASE("emission rates")
{
    const EmissionRates zero = emission_rates(RateState5{}, 1.0);
    CHECK(zero.I_tot == 0.0);

    const EmissionRates r = steady_emission_split(params(1.0, 1.0, 1.0));
    CHECK(r.I_L == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.I_R == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.I_tot == doctest::Approx(0.5).epsilon(1e-15));

    const EmissionRates res = steady_emission_split(params(1.7, 0.0, 0.6));
    CHECK(res.I_L == 0.0);
    CHECK(res.I_R == doctest::Approx(1.7 * 1.7 / 0.6).epsilon(1e-15));

    // near-resonant split at Delta = 0.5
    const EmissionRates nr = steady_emission_split(params(1.0, -1.0, 1.0));
    CHECK(nr.I_L == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(nr.I_R == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("emission rates: quadratic in the drive, ratios fixed")
{
    const EmissionRates a = steady_emission_split(params(1.0, 0.8, 1.3));
    const EmissionRates b = steady_emission_split(params(2.0, 0.8, 1.3));
    CHECK(b.I_L == doctest::Approx(4.0 * a.I_L).epsilon(1e-14));
    CHECK(b.I_R == doctest::Approx(4.0 * a.I_R).epsilon(1e-14));
    CHECK(std::abs(b.I_L / b.I_tot - a.I_L / a.I_tot) < 1e-15);
}

TEST_CASE("single mode: rhs and steady state")
{
    const SingleModeState d = single_mode_rhs({}, 1.0, 0.3, 0.5);
    CHECK(d.n == 0.0);
    CHECK(d.k1 == 0.0);
    CHECK(d.k2 == 1.0);

    for (double Delta : {-1.0, 0.0, 0.25, 0.5, 2.0}) {
        const SingleModeSteady ss = single_mode_steady(1.3, Delta, 0.8);
        const SingleModeState r = single_mode_rhs(ss.state, 1.3, Delta, 0.8);
        CHECK(std::abs(r.n) < 1e-14);
        CHECK(std::abs(r.k1) < 1e-14);
        CHECK(std::abs(r.k2) < 1e-14);
        CHECK(max_abs_diff(ss.state, single_mode_steady_linear_solve(1.3, Delta, 0.8)) < 1e-12);
    }

    const SingleModeSteady res = single_mode_steady(1.0, 0.0, 1.0);
    CHECK(res.state.n == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(res.emission_rate == doctest::Approx(1.0).epsilon(1e-15));
    const SingleModeSteady half = single_mode_steady(1.0, 0.5, 1.0);
    CHECK(half.emission_rate == doctest::Approx(0.5).epsilon(1e-15));
    const SingleModeSteady dark = single_mode_steady(0.0, 0.5, 1.0);
    CHECK(dark.emission_rate == 0.0);
    CHECK(dark.state.n == 0.0);
}

TEST_CASE("reduced total: same equations as the single mode model")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double n = u(rng), k1 = u(rng), k2 = u(rng), Omega = std::abs(u(rng)), Delta = u(rng),
                     kappa = std::abs(u(rng));
        const SingleModeState a = reduced_total_rhs(n, k1, k2, Omega, Delta, kappa);
        const SingleModeState b = single_mode_rhs({n, k1, k2}, Omega, Delta, kappa);
        CHECK(max_abs_diff(a, b) == 0.0);
    }
    const SingleModeState z = reduced_total_rhs(0.0, 0.0, 0.0, 1.0, 0.4, 1.0);
    CHECK(z.k2 == 1.0);
}

TEST_CASE("reduced total: traveling n_L + n_R follows it with J = -2 Delta")
{
    for (double Delta : {0.1, 0.5, 1.0}) {
        TravelingWaveParams p = params(1.0, coupling_near_resonant(Delta), 1.0);
        const auto tw = evolve_traveling(p, RateState5{}, 10.0, StepperConfig{});
        const auto rt = evolve_reduced_total(1.0, Delta, 1.0, SingleModeState{}, 10.0, StepperConfig{});
        REQUIRE(tw.times == rt.times);
        double worst = 0.0;
        for (std::size_t i = 0; i < tw.size(); ++i)
            worst = std::max(worst, std::abs(tw.states[i].n_tot() - rt.states[i].n));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("lorentzian total rate")
{
    CHECK(lorentzian_total_rate(1.5, 0.0, 0.5) == doctest::Approx(1.5 * 1.5 / 0.5).epsilon(1e-15));
    CHECK(lorentzian_total_rate(1.0, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lorentzian_total_rate(1.0, -0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lorentzian_total_rate(1.0, 1e8, 1.0) < 1e-15);
    for (double Delta : {-2.0, -0.3, 0.0, 0.7}) {
        const TravelingWaveParams p = params(1.0, coupling_near_resonant(Delta), 1.0);
        CHECK(steady_emission_split(p).I_tot
              == doctest::Approx(lorentzian_total_rate(1.0, Delta, 1.0)).epsilon(1e-14));
    }
}

TEST_CASE("default step scales with the fastest rate")
{
    CHECK(default_step(params(1.0, 0.0, 1.0)) == doctest::Approx(0.01));
    CHECK(default_step(params(1.0, 50.0, 1.0)) < 0.01);
}
