#pragma once

#include "stratflow/stratification.hpp"

#include <string>
#include <vector>

namespace stratflow::analytic {

/// Stationary radial vortex psi(R) = -sqrt(g/L) (R + L) exp(-R/L) in a
/// linearly stratified background d rho0/dz = -a. Coordinates are relative
/// to the vortex centre.
struct AnalyticVortex {
    double L = 0.05;  ///< m, > 0
    double a = 0.0;   ///< kg/m^4, >= 0
    double g = kGravity;

    void validate() const;
};

/// Argument of the sin/cos terms that describe the reeling of isopycnals.
enum class PhaseForm {
    /// sqrt(g/L) exp(-R/L) t / (2 pi L): the angle that follows from
    /// substituting the stationary vortex into the continuity equation.
    Continuity,
    /// exp(-R/L) t / (2 pi), as it appears in the closed-form vorticity
    /// correction. Not dimensionless; kept for side-by-side comparison.
    AsPrinted,
};

/// How the x-derivative of the reeled density is written in the source.
enum class SourceForm {
    /// Second bracket term cos(theta) theta x, exactly as printed.
    AsPrinted,
    /// cos(theta) theta x / L, the true derivative of advected_density.
    Consistent,
};

double psi_stationary(double R, const AnalyticVortex& v);

/// Azimuthal speed d psi / dR = sqrt(g/L) (R/L) exp(-R/L).
double v_of_R(double R, const AnalyticVortex& v);

/// Golden-section maximisation of v_of_R on [0, 10 L]; returns the argmax.
double v_argmax(const AnalyticVortex& v, double rel_tol = 1e-12);

/// Rotation angle theta(R, t) of a particle at radius R.
double phase(double R, double t, const AnalyticVortex& v, PhaseForm form = PhaseForm::Continuity);

/// rho0(z - R sin(theta)), with R = sqrt(x^2 + z^2).
double advected_density(double x, double z, double t, const AnalyticVortex& v,
                        const StratificationProfile& profile,
                        PhaseForm form = PhaseForm::Continuity);

/// rho Q ~ g d rho / dx for the reeled density, using rho0' = -a.
double source_rhoQ(double x, double z, double t, const AnalyticVortex& v,
                   const StratificationProfile& profile, SourceForm form = SourceForm::AsPrinted);

/// Vorticity source Q = (rho Q) / rho, 1/s^2.
double source_Q(double x, double z, double t, const AnalyticVortex& v,
                const StratificationProfile& profile, SourceForm form = SourceForm::AsPrinted);

/// Leading vorticity term -sqrt(g/L) (2 - R/L) exp(-R/L), as printed.
double xi0(double R, const AnalyticVortex& v);

/// Generated vorticity
///   -(a g x)/(R L) { 2 pi (R + L) [cos(theta) - 1] exp(R/L) + R t sin(theta) },
/// with theta chosen by `form`. Zero on the axis R = 0.
double xi1(double x, double z, double t, const AnalyticVortex& v,
           PhaseForm form = PhaseForm::Continuity);

/// True vorticity of psi_stationary, psi'' + psi'/R
///   = sqrt(g/L) (1/L) (2 - R/L) exp(-R/L),
/// with the R -> 0 limit 2 sqrt(g/L) / L.
double laplacian_psi_oracle(double R, const AnalyticVortex& v);

struct OracleCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Self-consistency checks of the closed forms above: argmax of v_of_R,
/// second-order agreement of laplacian_psi_oracle with a finite-difference
/// Laplacian of psi_stationary, xi1 vanishing at t = 0, xi1 odd in x, and
/// the fixed -1/L ratio between laplacian_psi_oracle and xi0.
std::vector<OracleCheck> oracle_suite(const AnalyticVortex& v = {0.05, 4.0, kGravity});

} // namespace stratflow::analytic
