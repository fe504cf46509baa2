#pragma once

#include "stratflow/grid.hpp"
#include "stratflow/solver.hpp"
#include "stratflow/stratification.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stratflow {

/// Gaussian streamfunction blob
///   psi(x, z, 0) = A exp(-[((x - x0)/lx)^2 + ((z - z0)/lz)^2]).
struct VortexParams {
    double A = -0.0095;  ///< m^2/s
    double lx = 0.16;    ///< m
    double lz = 0.052;   ///< m
    double x0 = 0.5;     ///< m
    double z0 = 0.125;   ///< m
};

struct ScenarioConfig {
    std::string name = "baseline";
    double width = 1.0;
    double height = 0.25;
    double h = 0.0025;
    StratificationProfile profile = StratificationProfile::exponential(1000.0, 6.23);
    VortexParams vortex;
    double t_end = 14.0;
    std::vector<double> snapshot_times{3.0, 7.0, 8.0, 9.0, 14.0};
    int diag_interval = 10;
    SolverConfig solver;
    std::string output_dir;

    Grid grid() const { return make_grid(width, height, h); }

    /// Throws ConfigurationError when any part is inconsistent: grid,
    /// profile, solver bounds, snapshot times outside [0, t_end], vortex
    /// centre not strictly inside the domain.
    void validate() const;
};

/// Names accepted by preset().
const std::vector<std::string>& preset_names();

/// Scenario presets for the published runs: baseline, coarse, H-half,
/// H-double, H-huge, homogeneous, tank-50cm. Throws ConfigurationError
/// listing the valid names for anything else.
ScenarioConfig preset(const std::string& name);

/// Command-line style overrides applied on top of a preset.
struct Overrides {
    std::optional<double> h;
    std::optional<double> H;
    std::optional<double> t_end;
    std::optional<std::string> output_dir;
};

/// Applies overrides. A shorter t_end drops snapshot times past it.
ScenarioConfig apply_overrides(ScenarioConfig cfg, const Overrides& o);

/// Parses `key = value` lines (# comments allowed). Keys mirror the
/// ScenarioConfig fields: name, preset, width, height, h, profile.kind,
/// profile.rho00, profile.H, profile.a, vortex.A, vortex.lx, vortex.lz,
/// vortex.x0, vortex.z0, t_end, snapshot_times, diag_interval,
/// solver.courant, solver.div_tol, solver.poisson_tol,
/// solver.poisson_max_iter, solver.limiter, solver.momentum,
/// solver.dt_max, output_dir. A `preset` key seeds every field that the
/// file does not set; otherwise the baseline preset is the starting point.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Serialises a scenario in the format parse_config reads.
std::string format_config(const ScenarioConfig& cfg);

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "STRATFLOW_OUTPUT_DIR";

/// Value of kOutputDirEnv, or `fallback` when unset or empty.
std::string default_output_dir(const std::string& fallback);

} // namespace stratflow
