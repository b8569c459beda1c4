#include "twosided/classical_scattering.hpp"

#include <cmath>
#include <stdexcept>

#include "twosided/numerics.hpp"

namespace twosided {

CavityGeometry::CavityGeometry(double length_d, double refractive_index_n, double light_speed_c)
    : length_d_(length_d), refractive_index_n_(refractive_index_n), light_speed_c_(light_speed_c)
{
    if (!(length_d > 0.0) || !std::isfinite(length_d))
        throw std::invalid_argument("CavityGeometry: length must be finite and > 0");
    if (!(refractive_index_n >= 1.0) || !std::isfinite(refractive_index_n))
        throw std::invalid_argument("CavityGeometry: refractive index must be finite and >= 1");
    if (!(light_speed_c > 0.0) || !std::isfinite(light_speed_c))
        throw std::invalid_argument("CavityGeometry: light speed must be finite and > 0");
}

CavityGeometry CavityGeometry::natural(double refractive_index_n)
{
    return with_transit_time(refractive_index_n, 1.0);
}

CavityGeometry CavityGeometry::with_transit_time(double refractive_index_n, double transit_time)
{
    if (!(refractive_index_n >= 1.0))
        throw std::invalid_argument("CavityGeometry: refractive index must be >= 1");
    return CavityGeometry(transit_time / refractive_index_n, refractive_index_n, 1.0);
}

double CavityGeometry::round_trip_phase(double omega0) const
{
    return omega0 * transit_time();
}

FresnelSet fresnel_coefficients(double n)
{
    if (!(n >= 1.0) || !std::isfinite(n))
        throw std::invalid_argument(
            "fresnel_coefficients: refractive index must be >= 1 (vacuum outside, dielectric inside)");
    return {(n - 1.0) / (n + 1.0), 2.0 * n / (n + 1.0), (1.0 - n) / (1.0 + n), 2.0 / (1.0 + n)};
}

double finesse(double r)
{
    const double one_minus = 1.0 - r * r;
    return 4.0 * r * r / (one_minus * one_minus);
}

ScatteringAmplitudes amplitudes_at_phase(double r, double phi)
{
    const std::complex<double> once = reduced_unit_phasor(phi);
    const std::complex<double> twice = once * once;
    const std::complex<double> denom = 1.0 - r * r * twice;
    return {r * (twice - 1.0) / denom, (1.0 - r * r) * once / denom};
}

ScatteringRates rates_at_phase(double r, double phi)
{
    const double F = finesse(r);
    const double s = reduced_sin(phi);
    const double Fs2 = F * s * s;
    return {Fs2 / (1.0 + Fs2), 1.0 / (1.0 + Fs2), F};
}

ScatteringAmplitudes cavity_amplitudes(const CavityGeometry &geom, double omega0)
{
    if (!(omega0 >= 0.0))
        throw std::invalid_argument("cavity_amplitudes: omega0 must be >= 0");
    return amplitudes_at_phase(fresnel_coefficients(geom.refractive_index()).r,
                               geom.round_trip_phase(omega0));
}

ScatteringRates cavity_rates(const CavityGeometry &geom, double omega0)
{
    if (!(omega0 >= 0.0))
        throw std::invalid_argument("cavity_rates: omega0 must be >= 0");
    return rates_at_phase(fresnel_coefficients(geom.refractive_index()).r,
                          geom.round_trip_phase(omega0));
}

ScatteringAmplitudes truncated_bounce_sum_at_phase(const FresnelSet &f, double phi, int m_max)
{
    if (m_max < 1)
        throw std::invalid_argument("truncated_bounce_sum: m_max must be >= 1");
    // E_T(m) = t' r^(m-1) e^(i m phi) t; even m leave through the entrance face.
    std::complex<double> reflected = f.r_prime;
    std::complex<double> transmitted = 0.0;
    double r_power = 1.0;
    for (int m = 1; m <= m_max; ++m) {
        const std::complex<double> term =
            f.t_prime * r_power * std::polar(1.0, static_cast<double>(m) * phi) * f.t;
        if (m % 2 == 0)
            reflected += term;
        else
            transmitted += term;
        r_power *= f.r;
    }
    return {reflected, transmitted};
}

ScatteringAmplitudes truncated_bounce_sum(const CavityGeometry &geom, double omega0, int m_max)
{
    if (!(omega0 >= 0.0))
        throw std::invalid_argument("truncated_bounce_sum: omega0 must be >= 0");
    return truncated_bounce_sum_at_phase(fresnel_coefficients(geom.refractive_index()),
                                         geom.round_trip_phase(omega0), m_max);
}

double undriven_intensity(const CavityGeometry &geom, double t, double I0)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("undriven_intensity: t must be >= 0");
    if (!(I0 >= 0.0))
        throw std::invalid_argument("undriven_intensity: I0 must be >= 0");
    const double r = fresnel_coefficients(geom.refractive_index()).r;
    return std::pow(r, 2.0 * t / geom.transit_time()) * I0;
}

} // namespace twosided
