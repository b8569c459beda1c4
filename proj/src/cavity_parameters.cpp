#include "twosided/cavity_parameters.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "twosided/numerics.hpp"

namespace twosided {

namespace {

void check_reflectivity(double r, double transit_time)
{
    if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("reflectivity must lie in [0, 1]");
    if (r == 0.0)
        throw std::domain_error("no cavity: decay rate diverges (r = 0)");
    if (!(transit_time > 0.0) || !std::isfinite(transit_time))
        throw std::invalid_argument("transit time n d / c must be finite and > 0");
}

double reflectivity(const CavityGeometry &geom)
{
    return fresnel_coefficients(geom.refractive_index()).r;
}

} // namespace

void TravelingWaveParams::validate() const
{
    if (!std::isfinite(kappa) || !std::isfinite(coupling_J) || !std::isfinite(rabi_Omega)
        || !std::isfinite(detuning_Delta))
        throw std::invalid_argument("TravelingWaveParams: all fields must be finite");
    if (kappa < 0.0)
        throw std::invalid_argument("TravelingWaveParams: kappa must be >= 0");
    if (rabi_Omega < 0.0)
        throw std::invalid_argument("TravelingWaveParams: Omega must be >= 0");
}

double kappa_from_reflectivity(double r, double transit_time)
{
    check_reflectivity(r, transit_time);
    if (r == 1.0)
        return 0.0;
    return -2.0 / transit_time * std::log(r);
}

double coupling_from_reflectivity(double r, double transit_time, double phi)
{
    check_reflectivity(r, transit_time);
    const double s = reduced_sin(phi);
    if (s == 0.0)
        return 0.0;
    if (r == 1.0)
        return -2.0 / transit_time * s;
    const double one_minus_r2 = (1.0 - r) * (1.0 + r);
    return 4.0 / transit_time * (r * std::log(r) / one_minus_r2) * s;
}

RatePair high_reflectivity_from_reflectivity(double r, double transit_time, double phi)
{
    if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("reflectivity must lie in [0, 1]");
    if (!(transit_time > 0.0) || !std::isfinite(transit_time))
        throw std::invalid_argument("transit time n d / c must be finite and > 0");
    const double s = reduced_sin(phi);
    return {(1.0 - r) * (1.0 + r) / transit_time, s == 0.0 ? 0.0 : -2.0 * r / transit_time * s};
}

double kappa_exact(const CavityGeometry &geom)
{
    return kappa_from_reflectivity(reflectivity(geom), geom.transit_time());
}

double coupling_exact(const CavityGeometry &geom, double omega0)
{
    return coupling_from_reflectivity(reflectivity(geom), geom.transit_time(),
                                      geom.round_trip_phase(omega0));
}

RatePair params_high_reflectivity(const CavityGeometry &geom, double omega0)
{
    return high_reflectivity_from_reflectivity(reflectivity(geom), geom.transit_time(),
                                               geom.round_trip_phase(omega0));
}

double resonance_frequency(const CavityGeometry &geom, int m)
{
    if (m < 1)
        throw std::invalid_argument("resonance_frequency: mode index must be >= 1");
    return static_cast<double>(m) * std::numbers::pi / geom.transit_time();
}

Resonance resonance(const CavityGeometry &geom, int m)
{
    return {m, resonance_frequency(geom, m)};
}

Detuning nearest_detuning(const CavityGeometry &geom, double omega0)
{
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw std::invalid_argument("nearest_detuning: omega0 must be finite and > 0");
    const double x = omega0 * geom.transit_time() / std::numbers::pi;
    const double lower = std::floor(x);
    const double frac = x - lower;
    double m = frac <= 0.5 + 1e-12 ? lower : lower + 1.0;
    if (m < 1.0)
        m = 1.0;
    if (m > 2147483647.0)
        throw std::invalid_argument("nearest_detuning: mode index out of range");
    const int mode = static_cast<int>(m);
    return {resonance_frequency(geom, mode) - omega0, mode};
}

double coupling_near_resonant(double Delta)
{
    return -2.0 * Delta;
}

TravelingWaveParams traveling_params(const CavityGeometry &geom, double omega0, double Omega)
{
    TravelingWaveParams p;
    p.kappa = kappa_exact(geom);
    p.coupling_J = coupling_exact(geom, omega0);
    p.rabi_Omega = Omega;
    p.detuning_Delta = nearest_detuning(geom, omega0).Delta;
    p.validate();
    return p;
}

} // namespace twosided
