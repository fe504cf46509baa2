#pragma once

#include "stratflow/grid.hpp"
#include "stratflow/stratification.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stratflow {

// All functionals are per unit depth and use midpoint quadrature (cell sum
// times h^2). Kinetic energy density in a cell is rho times the mean of the
// squared velocities on its four faces; summed over the domain this is
// exactly the face-based energy sum(rho_face * u_face^2 / 2) that the
// momentum scheme conserves.

/// Total mass, kg/m.
double mass(const State& state, const Grid& grid);

/// sum rho (u^2 + w^2) / 2, J/m.
double kinetic_energy(const State& state, const Grid& grid);

/// Hydrodynamic energy sum rho ((u^2 + w^2) / 2 + g z), J/m.
double hydro_energy(const State& state, const Grid& grid);

/// Generalised wave energy
///   sum [rho (u^2 + w^2)/2 + rho g z + g H (rho ln(rho / rho0(0)) + rho0(z) - rho)] h^2.
/// The potential part is evaluated in the algebraically identical form
/// g H rho0 ((1 + eta) ln(1 + eta) - eta) with rho = rho0 (1 + eta), which is
/// non-negative cell by cell. Requires an exponential profile; throws
/// DomainError for rho <= 0 or a non-exponential profile.
double wave_energy_nonlinear(const State& state, const Grid& grid,
                             const StratificationProfile& profile);

/// Cellwise integrand of wave_energy_nonlinear (J/m^3), cell-centred.
Field wave_energy_density(const State& state, const Grid& grid,
                          const StratificationProfile& profile);

/// Linear wave energy (1/2) sum rho0 [(u^2 + w^2) + g H phi^2] h^2 with
/// rho = rho0 (1 + phi). Exponential profiles only.
double wave_energy_linear(const State& state, const Grid& grid,
                          const StratificationProfile& profile);

/// Linear hydrodynamic energy sum rho0 [(u^2 + w^2)/2 + g z phi] h^2.
double hydro_energy_linear(const State& state, const Grid& grid,
                           const StratificationProfile& profile);

/// sum rho ln(rho / rho00) h^2, kg/m. Non-positive while rho <= rho00.
double f_functional(const State& state, const Grid& grid, double rho00);

/// Relative density excess below which an inverted pair counts as neutral.
/// Projection residuals leave round-off sized wiggles in a uniform fluid;
/// resolved overturns are many orders of magnitude larger.
inline constexpr double kMixingRelTol = 1e-9;

/// Fraction of vertically adjacent cell pairs with the upper cell denser
/// than the lower one (locally statically unstable), out of nx (nz - 1).
double mixing_fraction(const State& state, const Grid& grid, double rel_tol = kMixingRelTol);

/// One row of the diagnostics time series. Functionals that need an
/// exponential profile are NaN otherwise.
struct FunctionalSample {
    double t = 0.0;
    double mass = 0.0;
    double kinetic = 0.0;
    double hydro_energy = 0.0;
    double H_nonl = 0.0;
    double H_lin = 0.0;
    double E_lin = 0.0;
    double F = 0.0;
    double mixing_fraction = 0.0;
};

FunctionalSample sample_functionals(const State& state, const Grid& grid,
                                    const StratificationProfile& profile);

/// Pass/fail of one admissibility condition with the worst offending
/// sample (index into the series, -1 when there is none).
struct Check {
    bool passed = true;
    double worst = 0.0;
    long index = -1;
};

struct AdmissibilityVerdict {
    Check energy_conserved;  ///< worst |E(t) - E(0)| / energy scale
    Check F_monotone;        ///< worst F(t1) - min_{t2 < t1} F(t2)
    Check H_nonl_monotone;   ///< worst H(t1) - min_{t2 < t1} H(t2)
    Check mass_conserved;    ///< worst |M(t) - M(0)| / M(0)

    bool all_passed() const
    {
        return energy_conserved.passed && F_monotone.passed && H_nonl_monotone.passed &&
               mass_conserved.passed;
    }
};

/// Tolerances for admissibility_report. The monotonicity allowances are
/// relative: f_rel * |F(0)| and h_rel * max_t H_nonl(t).
struct AdmissibilityTolerances {
    double energy = 0.02;  ///< fraction of the initial kinetic energy
    double f_rel = 1e-8;
    double h_rel = 1e-6;
    double mass = 1e-11;
};

/// Evaluates the energy equality, the two monotonicity conditions and mass
/// conservation on a sampled series. The energy scale is the first sample's
/// kinetic energy when that is positive, otherwise its H_nonl. A series
/// whose H_nonl is NaN throughout passes that check vacuously. Throws
/// InputError for an empty series or non-increasing times.
AdmissibilityVerdict admissibility_report(std::span<const FunctionalSample> series,
                                          const AdmissibilityTolerances& tol = {});

/// Worst violation of "x(t1) <= x(t2) + tol for all t1 > t2", as
/// max_j (x_j - min_{i<j} x_i); returns the index of the worst sample.
Check monotone_non_increasing(std::span<const double> values, double tol);

/// diagnostics.csv: header `t,mass,hydro_energy,H_nonl,H_lin,F,mixing_fraction`.
void write_diagnostics_csv(const std::string& path, std::span<const FunctionalSample> series);
std::vector<FunctionalSample> read_diagnostics_csv(const std::string& path);

std::string describe(const AdmissibilityVerdict& verdict);

} // namespace stratflow
