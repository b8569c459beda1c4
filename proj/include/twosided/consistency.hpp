#ifndef TWOSIDED_CONSISTENCY_HPP
#define TWOSIDED_CONSISTENCY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twosided/classical_scattering.hpp"

namespace twosided {

// Outcome of one executable identity check over a parameter grid.
// `pass` is true exactly when max_deviation <= tolerance. Ungated reports
// (tolerance unset) carry data only and always pass.
struct ConsistencyReport
{
    std::string name;
    std::string grid;
    double max_deviation = 0.0;
    std::optional<double> tolerance;
    bool pass = true;
    std::string worst_point;

    std::string to_text() const;
    nlohmann::json to_json() const;
};

// Classical undriven intensity r^(2ct/nd) against exp(-kappa_exact t).
ConsistencyReport check_flux_condition(const CavityGeometry &geom, const std::vector<double> &t_grid);

// J^2/(J^2+kappa^2) = R_cav and kappa^2/(J^2+kappa^2) = T_cav at every phase.
// kappa_scale != 1 injects a fault into kappa (negative control).
ConsistencyReport check_ratio_identity(const CavityGeometry &geom, const std::vector<double> &phi_grid,
                                       double kappa_scale = 1.0);

// Traveling model with J = -2 Delta vs the single-mode model, both from
// vacuum: max_t |n_L + n_R - n|, gated at 1e-9.
ConsistencyReport compare_near_resonant(double Omega, double Delta, double kappa, double duration);

// Ungated: |J_exact| against the near-resonant rule 2|Delta| for drives
// offset by the given detunings from resonance m of the geometry.
ConsistencyReport near_resonant_approximation_gap(const CavityGeometry &geom, int mode_index,
                                                  const std::vector<double> &detunings);

// kappa_exact and sup_phi |J_exact| scale as (nd/c)^-1 and vanish for long
// cavities: both must fall strictly along the grid and lie below 1e-6 at
// nd/c >= 1e7.
ConsistencyReport check_free_field_limit(double r, const std::vector<double> &scale_grid);

// Seeded random (r, phi) points for the ratio identity, reported separately
// from the deterministic grid.
ConsistencyReport fuzz_ratio_identity(std::uint64_t seed, std::size_t count);

struct SuiteOptions
{
    double kappa_scale = 1.0;
    std::optional<std::uint64_t> fuzz_seed;
    std::size_t fuzz_count = 1000;
};

// The full condition list on the default deterministic grids.
std::vector<ConsistencyReport> run_consistency_suite(const SuiteOptions &opts = {});

nlohmann::json reports_to_json(const std::vector<ConsistencyReport> &reports);

} // namespace twosided

#endif // TWOSIDED_CONSISTENCY_HPP
