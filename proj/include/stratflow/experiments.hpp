#pragma once

#include "stratflow/diagnostics.hpp"
#include "stratflow/grid.hpp"
#include "stratflow/poisson.hpp"
#include "stratflow/scenario.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratflow {

/// Gaussian streamfunction value at (x, z).
double gaussian_psi(double x, double z, const VortexParams& vortex);

/// Vortex initial state: face velocities from the exact derivatives of the
/// Gaussian streamfunction (u = dpsi/dz, w = -dpsi/dx), rho = rho0(z) at
/// cell centres, hydrostatic pressure. One projection removes the O(h^2)
/// discrete divergence. A vortex whose streamfunction exceeds 1e-6 |A| on a
/// wall is accepted, but a message is appended to `warnings` (or printed to
/// stderr when `warnings` is null).
State gaussian_vortex_init(const Grid& grid, const StratificationProfile& profile,
                           const VortexParams& vortex, const SolverConfig& cfg = {},
                           std::vector<std::string>* warnings = nullptr);

/// Largest |psi| on the four walls divided by |A|.
double vortex_wall_ratio(const Grid& grid, const VortexParams& vortex);

/// Small-amplitude standing internal wave, psi = A sin(kx x) sin(kz z) with
/// kx = mx pi / width and kz = mz pi / height. Velocities are nodal
/// differences of psi, so the field is exactly divergence-free.
State standing_wave_init(const Grid& grid, const StratificationProfile& profile, double A,
                         int mx = 1, int mz = 1);

struct StreamfunctionResult {
    Field psi;                ///< nodes, zero on the walls
    PoissonStats stats;
    double velocity_mismatch; ///< max |v - curl psi| / max |v|
    bool consistent;          ///< mismatch within kStreamfunctionMismatchTol
};

inline constexpr double kStreamfunctionMismatchTol = 1e-6;

/// Recovers psi from laplacian(psi) = xi with psi = 0 on the walls, xi the
/// nodal vorticity du/dz - dw/dx. A velocity field that cannot be written
/// as the curl of a wall-vanishing psi (uniform flow, say) shows up as a
/// large velocity_mismatch.
StreamfunctionResult diagnose_streamfunction(const State& state, const Grid& grid,
                                             const SolverConfig& cfg);

struct Snapshot {
    State state;
    Field psi;  ///< nodes
    Field xi;   ///< nodes
};

Snapshot make_snapshot(const State& state, const Grid& grid, const SolverConfig& cfg);

/// Cell-centred view of a snapshot, the content of one CSV file.
struct SnapshotTable {
    double t = 0.0;
    int nx = 0;
    int nz = 0;
    double h = 0.0;
    Field x, z, rho, u, w, psi, xi;
};

/// Averages velocities (faces) and psi, xi (corners) onto cell centres.
SnapshotTable tabulate(const Snapshot& snapshot, const Grid& grid);

/// Writes `# t=<s> nx=<n> nz=<n> h=<m>`, a column line, then one row
/// x,z,rho,u,w,psi,xi per cell with x varying fastest, %.9g.
void write_snapshot(const Snapshot& snapshot, const Grid& grid, const std::string& path);
SnapshotTable read_snapshot(const std::string& path);

/// Thrown by run() when the integration blows up. Carries everything
/// produced before the failure.
class RunFailure : public std::runtime_error {
public:
    RunFailure(const std::string& what, Snapshot last_good, std::vector<FunctionalSample> series)
        : std::runtime_error(what), last_good_(std::move(last_good)), series_(std::move(series))
    {
    }
    const Snapshot& last_good() const { return last_good_; }
    const std::vector<FunctionalSample>& series() const { return series_; }

private:
    Snapshot last_good_;
    std::vector<FunctionalSample> series_;
};

struct RunResult {
    ScenarioConfig scenario;
    std::vector<FunctionalSample> series;
    std::vector<double> max_abs_vorticity;   ///< per sample, nodes
    std::vector<double> min_wave_energy;     ///< per sample, cellwise H_nonl integrand (NaN if undefined)
    std::vector<double> max_divergence;      ///< per sample
    std::vector<Snapshot> snapshots;
    AdmissibilityVerdict verdict;
    long steps = 0;
    std::vector<std::string> warnings;
    std::vector<std::string> written_files;
};

/// Called after every accepted step.
using StepObserver = std::function<void(const State&)>;

/// Runs a scenario from its Gaussian vortex initial state. Output files go
/// to <output_dir>/<name>/ when output_dir is non-empty.
RunResult run(const ScenarioConfig& scenario, const StepObserver& observer = {});

/// Same, from a caller-supplied initial state.
RunResult run(const ScenarioConfig& scenario, State initial, const StepObserver& observer = {});

struct SweepEntry {
    std::string name;
    double H = 0.0;            ///< +inf for non-exponential profiles
    bool ok = false;
    std::string error;
    double mixing_at_7 = 0.0;  ///< NaN when the run has no sample at t = 7 s
    double F_decay = 0.0;      ///< (F(0) - F(end)) / |F(0)|, NaN when F(0) = 0
    AdmissibilityVerdict verdict;
    RunResult result;
};

/// Runs each preset (with overrides) in its own worker thread. Failures are
/// recorded per entry and do not stop the others. Entries are sorted by H.
std::vector<SweepEntry> run_sweep(const std::vector<std::string>& names, const Overrides& overrides);

/// Fixed-width comparison table of a sweep.
std::string format_sweep_table(const std::vector<SweepEntry>& entries);

} // namespace stratflow
