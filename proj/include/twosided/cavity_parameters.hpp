#ifndef TWOSIDED_CAVITY_PARAMETERS_HPP
#define TWOSIDED_CAVITY_PARAMETERS_HPP

#include "twosided/classical_scattering.hpp"

namespace twosided {

// Constants of the traveling-wave master equation. Rates share one time unit;
// hbar = 1 throughout.
struct TravelingWaveParams
{
    double kappa = 0.0;          // spontaneous leakage rate through either mirror
    double coupling_J = 0.0;     // left/right conversion rate (signed)
    double rabi_Omega = 0.0;     // drive amplitude inside the cavity
    double detuning_Delta = 0.0; // only used by near-resonant / single-mode contexts

    void validate() const;
};

struct Resonance
{
    int mode_index = 1;
    double omega = 0.0;
};

struct Detuning
{
    double Delta = 0.0; // omega_m - omega0
    int mode_index = 1;
};

struct RatePair
{
    double kappa = 0.0;
    double coupling_J = 0.0;
};

// kappa = -(2c/nd) ln r. Throws std::domain_error for n = 1 (r = 0): the
// decay rate diverges and there is no cavity.
double kappa_exact(const CavityGeometry &geom);

// J(omega0) = (4c/nd) * r ln r / (1 - r^2) * sin(omega0 n d / c), with the
// r -> 1 limit -(2c/nd) sin(phi). Exactly zero on resonance.
double coupling_exact(const CavityGeometry &geom, double omega0);

// Highly reflecting mirror forms: kappa = (c/nd)(1 - r^2), J = -(2rc/nd) sin(phi).
RatePair params_high_reflectivity(const CavityGeometry &geom, double omega0);

// omega_m = m pi c / (n d), m >= 1.
double resonance_frequency(const CavityGeometry &geom, int m);
Resonance resonance(const CavityGeometry &geom, int m);

// Detuning from the nearest resonance; a drive exactly midway between two
// resonances is assigned to the lower one.
Detuning nearest_detuning(const CavityGeometry &geom, double omega0);

// J = -2 Delta
double coupling_near_resonant(double Delta);

// Reflectivity-based forms: r in [0, 1], transit_time = n d / c, phi = omega0 n d / c.
// r = 1 is the lossless cavity (kappa = 0, J from the analytic limit).
double kappa_from_reflectivity(double r, double transit_time);
double coupling_from_reflectivity(double r, double transit_time, double phi);
RatePair high_reflectivity_from_reflectivity(double r, double transit_time, double phi);

// kappa_exact and coupling_exact at omega0, with the given drive.
TravelingWaveParams traveling_params(const CavityGeometry &geom, double omega0, double Omega);

} // namespace twosided

#endif // TWOSIDED_CAVITY_PARAMETERS_HPP
