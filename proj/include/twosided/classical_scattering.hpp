#ifndef TWOSIDED_CLASSICAL_SCATTERING_HPP
#define TWOSIDED_CLASSICAL_SCATTERING_HPP

#include <complex>

namespace twosided {

// Dielectric slab of length d and refractive index n in vacuum. Light speed
// defaults to 1, and the natural() factory fixes the one-way transit time
// n*d/c to 1 so that rates come out in units of c/(n*d).
class CavityGeometry
{
public:
    CavityGeometry(double length_d, double refractive_index_n, double light_speed_c = 1.0);

    static CavityGeometry natural(double refractive_index_n);
    // Geometry with a prescribed one-way transit time n*d/c (c = 1).
    static CavityGeometry with_transit_time(double refractive_index_n, double transit_time);

    double length() const { return length_d_; }
    double refractive_index() const { return refractive_index_n_; }
    double light_speed() const { return light_speed_c_; }

    // n*d/c
    double transit_time() const { return refractive_index_n_ * length_d_ / light_speed_c_; }
    // omega0 * n * d / c
    double round_trip_phase(double omega0) const;
    // Inverse of round_trip_phase.
    double frequency_for_phase(double phi) const { return phi / transit_time(); }

private:
    double length_d_;
    double refractive_index_n_;
    double light_speed_c_;
};

// Amplitude coefficients of a single vacuum/dielectric interface.
// r, t: dielectric -> vacuum.  r_prime, t_prime: vacuum -> dielectric.
struct FresnelSet
{
    double r = 0.0;
    double t = 1.0;
    double r_prime = 0.0;
    double t_prime = 1.0;
};

struct ScatteringAmplitudes
{
    std::complex<double> r_cav;
    std::complex<double> t_cav;
};

struct ScatteringRates
{
    double R_cav = 0.0;
    double T_cav = 1.0;
    double finesse = 0.0;
};

FresnelSet fresnel_coefficients(double n);

// F = 4 r^2 / (1 - r^2)^2
double finesse(double r);

// Closed-form Fabry-Perot amplitudes for internal reflectivity r and phase phi.
ScatteringAmplitudes amplitudes_at_phase(double r, double phi);
ScatteringRates rates_at_phase(double r, double phi);

ScatteringAmplitudes cavity_amplitudes(const CavityGeometry &geom, double omega0);
ScatteringRates cavity_rates(const CavityGeometry &geom, double omega0);

// Partial sums of the multiple-bounce series up to m_max crossings. Summed
// term by term with no closed form, so it serves as an independent check of
// cavity_amplitudes.
ScatteringAmplitudes truncated_bounce_sum(const CavityGeometry &geom, double omega0, int m_max);
ScatteringAmplitudes truncated_bounce_sum_at_phase(const FresnelSet &f, double phi, int m_max);

// I(t) = r^(2 c t / (n d)) * I0
double undriven_intensity(const CavityGeometry &geom, double t, double I0);

} // namespace twosided

#endif // TWOSIDED_CLASSICAL_SCATTERING_HPP
