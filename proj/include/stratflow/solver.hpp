#pragma once

#include "stratflow/grid.hpp"
#include "stratflow/poisson.hpp"
#include "stratflow/stratification.hpp"

#include <optional>
#include <span>
#include <vector>

namespace stratflow {

/// Slope limiter for the face reconstruction. `None` uses the unlimited
/// centred slope (Fromm).
enum class Limiter { Minmod, None };

/// How velocity is interpolated onto momentum control-volume faces.
/// `Centered` conserves discrete kinetic energy under advection; `Upwind`
/// reuses the limited MUSCL reconstruction and is dissipative.
enum class MomentumAdvection { Centered, Upwind };

struct SolverConfig {
    double courant = 0.25;
    double div_tol = 1e-9;        ///< max-norm divergence after projection, 1/s
    double poisson_tol = 1e-10;   ///< relative residual
    int poisson_max_iter = 2000;
    Limiter limiter = Limiter::Minmod;
    MomentumAdvection momentum = MomentumAdvection::Centered;
    double dt_max = 0.05;         ///< s
    double blowup_factor = 100.0; ///< abort when max|v| exceeds this times the initial max

    /// Throws ConfigurationError for courant outside (0, 1] or non-positive
    /// tolerances.
    void validate() const;
};

/// Face fluxes for one explicit update. Each value is owned by exactly one
/// face and enters the two adjacent control volumes with opposite signs.
struct Flux {
    Field mass_x;      ///< rho_hat * u on x-faces, kg/(m^2 s)
    Field mass_z;      ///< rho_hat * w on z-faces
    Field rho_hat_z;   ///< reconstructed density on z-faces (gravity term)
    Field mom_x_east;  ///< x-momentum flux through cell centres (nx x nz)
    Field mom_x_north; ///< x-momentum flux through nodes ((nx+1) x (nz+1))
    Field mom_z_east;  ///< z-momentum flux through nodes
    Field mom_z_north; ///< z-momentum flux through cell centres
};

/// Upwind-biased MUSCL fluxes of the conservative Euler system. Wall faces
/// carry zero flux; zero face velocity takes the centred average. A
/// non-empty `background` (one density per cell row) makes the vertical
/// reconstruction act on rho - background, so a state at rest on that
/// background sees exactly centred face densities.
Flux compute_fluxes(const State& state, const Grid& grid, Limiter limiter,
                    MomentumAdvection momentum = MomentumAdvection::Centered,
                    std::span<const double> background = {});

/// Limited slope from the two one-sided differences.
double limited_slope(double backward, double forward, Limiter limiter);

/// Stable time step: min(courant h / (max|v| + eps), courant / N, dt_max).
/// Throws NumericBlowup for non-finite velocities.
double cfl_dt(const State& state, const Grid& grid, const SolverConfig& cfg,
              const StratificationProfile& profile);

/// Pressure projection with beta = 1 / rho_face. The velocity becomes
/// discretely divergence-free, the walls stay closed and `state.p` is
/// incremented by the projection pressure (phi / dt).
State project(State state, double dt, const Grid& grid, const SolverConfig& cfg);

/// Discrete hydrostatic pressure consistent with the momentum stencil:
/// p(k+1) - p(k) = -g h (rho(k) + rho(k+1)) / 2, zero in the top row.
Field hydrostatic_pressure(const Field& rho, const Grid& grid);

/// Advances a state by one SSP-RK3 step with a projection per stage. Holds
/// the Poisson workspace between steps, counts steps and watches for
/// blowup.
class Integrator {
public:
    Integrator(Grid grid, SolverConfig cfg, StratificationProfile profile);

    /// Sets the velocity reference for blowup detection (normally the
    /// initial max speed).
    void set_reference_speed(double speed) { reference_speed_ = speed; }

    /// One step of size cfl_dt (or `dt` if given, clipped to cfl_dt).
    State step(const State& state, std::optional<double> dt = std::nullopt);

    /// Projects `state` using the cached operator.
    State project(State state, double dt);

    long steps_taken() const { return steps_; }
    const PoissonStats& last_poisson() const { return last_poisson_; }
    const Grid& grid() const { return grid_; }
    const SolverConfig& config() const { return cfg_; }
    const StratificationProfile& profile() const { return profile_; }

private:
    struct Conserved {
        Field rho;
        Field mx;
        Field mz;
    };

    Conserved euler_update(const State& s, const Field& p_old, double dt) const;
    State finish_stage(Conserved c, double dt, const Field& p_old, Field& q_out);
    void check_finite(const State& s) const;

    Grid grid_;
    SolverConfig cfg_;
    StratificationProfile profile_;
    FivePointSystem poisson_;
    Field q_guess_;
    std::vector<double> background_;  ///< rho0 at cell-centre heights
    PoissonStats last_poisson_;
    double reference_speed_ = 0.0;
    long steps_ = 0;
};

/// Stateless convenience wrapper around Integrator::step.
State step(const State& state, const Grid& grid, const SolverConfig& cfg,
           const StratificationProfile& profile);

/// Largest |u| or |w| over all faces.
double max_speed(const State& state);

} // namespace stratflow
