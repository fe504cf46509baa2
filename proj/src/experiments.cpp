#include "stratflow/experiments.hpp"

#include "stratflow/errors.hpp"
#include "stratflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace stratflow {

double gaussian_psi(double x, double z, const VortexParams& v)
{
    const double ax = (x - v.x0) / v.lx;
    const double az = (z - v.z0) / v.lz;
    return v.A * std::exp(-(ax * ax + az * az));
}

double vortex_wall_ratio(const Grid& grid, const VortexParams& v)
{
    // The Gaussian is largest on each wall at the foot of the perpendicular
    // from the centre.
    const double walls[] = {
        gaussian_psi(v.x0, 0.0, v),
        gaussian_psi(v.x0, grid.height, v),
        gaussian_psi(0.0, v.z0, v),
        gaussian_psi(grid.width, v.z0, v),
    };
    double worst = 0.0;
    for (double p : walls) {
        worst = std::max(worst, std::abs(p));
    }
    return worst / std::abs(v.A);
}

State gaussian_vortex_init(const Grid& grid, const StratificationProfile& profile,
                           const VortexParams& vortex, const SolverConfig& cfg,
                           std::vector<std::string>* warnings)
{
    if (!(vortex.x0 > 0.0 && vortex.x0 < grid.width && vortex.z0 > 0.0 &&
          vortex.z0 < grid.height)) {
        throw ConfigurationError("vortex centre must lie strictly inside the domain");
    }
    const double ratio = vortex_wall_ratio(grid, vortex);
    if (ratio > 1e-6) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "vortex reaches the walls: |psi| there is %.3g of |A| (limit 1e-6)", ratio);
        if (warnings) {
            warnings->emplace_back(msg);
        } else {
            std::cerr << "warning: " << msg << '\n';
        }
    }

    State s(grid);
    for (int k = 0; k < grid.nz; ++k) {
        const double r0 = rho0(profile, grid.zc(k), grid.height);
        for (int i = 0; i < grid.nx; ++i) {
            s.rho(i, k) = r0;
        }
    }
    const double cz = -2.0 / (vortex.lz * vortex.lz);
    const double cx = 2.0 / (vortex.lx * vortex.lx);
    for (int k = 0; k < grid.nz; ++k) {
        for (int i = 0; i <= grid.nx; ++i) {
            const double x = grid.xf(i);
            const double z = grid.zc(k);
            s.u(i, k) = gaussian_psi(x, z, vortex) * cz * (z - vortex.z0);
        }
    }
    for (int k = 0; k <= grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.xc(i);
            const double z = grid.zf(k);
            s.w(i, k) = gaussian_psi(x, z, vortex) * cx * (x - vortex.x0);
        }
    }
    apply_wall_bc(s);
    s.p = hydrostatic_pressure(s.rho, grid);
    const Field p_hydro = s.p;
    s = project(std::move(s), 1.0, grid, cfg);
    s.p = p_hydro;
    s.t = 0.0;
    return s;
}

State standing_wave_init(const Grid& grid, const StratificationProfile& profile, double A,
                         int mx, int mz)
{
    const double kx = mx * std::numbers::pi / grid.width;
    const double kz = mz * std::numbers::pi / grid.height;
    Field psi(grid, Placement::Node);
    for (int k = 0; k <= grid.nz; ++k) {
        for (int i = 0; i <= grid.nx; ++i) {
            psi(i, k) = A * std::sin(kx * grid.xf(i)) * std::sin(kz * grid.zf(k));
        }
    }
    State s(grid);
    for (int k = 0; k < grid.nz; ++k) {
        const double r0 = rho0(profile, grid.zc(k), grid.height);
        for (int i = 0; i < grid.nx; ++i) {
            s.rho(i, k) = r0;
        }
    }
    for (int k = 0; k < grid.nz; ++k) {
        for (int i = 0; i <= grid.nx; ++i) {
            s.u(i, k) = (psi(i, k + 1) - psi(i, k)) / grid.h;
        }
    }
    for (int k = 0; k <= grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            s.w(i, k) = -(psi(i + 1, k) - psi(i, k)) / grid.h;
        }
    }
    apply_wall_bc(s);
    s.p = hydrostatic_pressure(s.rho, grid);
    return s;
}

StreamfunctionResult diagnose_streamfunction(const State& state, const Grid& grid,
                                             const SolverConfig& cfg)
{
    const Field xi = vorticity_nodes(state, grid);
    const int ni = grid.nx - 1;
    const int nk = grid.nz - 1;

    // Interior nodes (1..nx-1, 1..nz-1); wall neighbours are Dirichlet zeros
    // and enter through the extra diagonal.
    FivePointSystem sys(ni, nk);
    std::vector<double> rhs(static_cast<std::size_t>(ni) * nk);
    for (int k = 0; k < nk; ++k) {
        for (int i = 0; i < ni; ++i) {
            if (i + 1 < ni) sys.coupling_x(i, k) = 1.0;
            if (k + 1 < nk) sys.coupling_z(i, k) = 1.0;
            int walls = 0;
            walls += (i == 0) + (i == ni - 1) + (k == 0) + (k == nk - 1);
            sys.extra_diagonal(i, k) = walls;
            rhs[static_cast<std::size_t>(k) * ni + i] = -grid.h * grid.h * xi(i + 1, k + 1);
        }
    }
    sys.factorize();
    std::vector<double> sol(rhs.size(), 0.0);
    StreamfunctionResult out;
    out.stats = sys.solve(rhs, sol, cfg.poisson_tol, 0.0, std::max(cfg.poisson_max_iter, 4 * (ni + nk)));

    out.psi = Field(grid, Placement::Node);
    for (int k = 0; k < nk; ++k) {
        for (int i = 0; i < ni; ++i) {
            out.psi(i + 1, k + 1) = sol[static_cast<std::size_t>(k) * ni + i];
        }
    }

    double mismatch = 0.0;
    for (int k = 0; k < grid.nz; ++k) {
        for (int i = 0; i <= grid.nx; ++i) {
            const double u = (out.psi(i, k + 1) - out.psi(i, k)) / grid.h;
            mismatch = std::max(mismatch, std::abs(u - state.u(i, k)));
        }
    }
    for (int k = 0; k <= grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            const double w = -(out.psi(i + 1, k) - out.psi(i, k)) / grid.h;
            mismatch = std::max(mismatch, std::abs(w - state.w(i, k)));
        }
    }
    const double vmax = max_speed(state);
    out.velocity_mismatch = vmax > 0.0 ? mismatch / vmax : mismatch;
    out.consistent = out.velocity_mismatch <= kStreamfunctionMismatchTol;
    return out;
}

Snapshot make_snapshot(const State& state, const Grid& grid, const SolverConfig& cfg)
{
    Snapshot s{state, diagnose_streamfunction(state, grid, cfg).psi, vorticity_nodes(state, grid)};
    return s;
}

SnapshotTable tabulate(const Snapshot& snap, const Grid& grid)
{
    SnapshotTable t;
    t.t = snap.state.t;
    t.nx = grid.nx;
    t.nz = grid.nz;
    t.h = grid.h;
    for (Field* f : {&t.x, &t.z, &t.rho, &t.u, &t.w, &t.psi, &t.xi}) {
        *f = Field(grid, Placement::Cell);
    }
    auto corners = [](const Field& n, int i, int k) {
        return 0.25 * (n(i, k) + n(i + 1, k) + n(i, k + 1) + n(i + 1, k + 1));
    };
    for (int k = 0; k < grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            t.x(i, k) = grid.xc(i);
            t.z(i, k) = grid.zc(k);
            t.rho(i, k) = snap.state.rho(i, k);
            t.u(i, k) = u_at_cell(snap.state, i, k);
            t.w(i, k) = w_at_cell(snap.state, i, k);
            t.psi(i, k) = corners(snap.psi, i, k);
            t.xi(i, k) = corners(snap.xi, i, k);
        }
    }
    return t;
}

namespace {

constexpr const char* kSnapshotColumns = "x,z,rho,u,w,psi,xi";

} // namespace

void write_snapshot(const Snapshot& snapshot, const Grid& grid, const std::string& path)
{
    const SnapshotTable t = tabulate(snapshot, grid);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    char line[256];
    std::snprintf(line, sizeof line, "# t=%.9g nx=%d nz=%d h=%.9g\n", t.t, t.nx, t.nz, t.h);
    out << line << kSnapshotColumns << '\n';
    for (int k = 0; k < t.nz; ++k) {
        for (int i = 0; i < t.nx; ++i) {
            std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", t.x(i, k),
                          t.z(i, k), t.rho(i, k), t.u(i, k), t.w(i, k), t.psi(i, k), t.xi(i, k));
            out << line;
        }
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

SnapshotTable read_snapshot(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    SnapshotTable t;
    std::string line;
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "# t=%lf nx=%d nz=%d h=%lf", &t.t, &t.nx, &t.nz, &t.h) != 4) {
        throw InputError(path + ": missing '# t=... nx=... nz=... h=...' metadata line");
    }
    if (t.nx <= 0 || t.nz <= 0) {
        throw InputError(path + ": bad grid size in metadata");
    }
    if (!std::getline(in, line) || line != kSnapshotColumns) {
        throw InputError(path + ": expected column line '" + kSnapshotColumns + "'");
    }
    for (Field* f : {&t.x, &t.z, &t.rho, &t.u, &t.w, &t.psi, &t.xi}) {
        *f = Field(t.nx, t.nz, Placement::Cell);
    }
    for (int k = 0; k < t.nz; ++k) {
        for (int i = 0; i < t.nx; ++i) {
            if (!std::getline(in, line)) {
                throw InputError(path + ": truncated, expected " + std::to_string(t.nx * t.nz) +
                                 " rows");
            }
            double v[7];
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2],
                            &v[3], &v[4], &v[5], &v[6]) != 7) {
                throw InputError(path + ": malformed row '" + line + "'");
            }
            t.x(i, k) = v[0];
            t.z(i, k) = v[1];
            t.rho(i, k) = v[2];
            t.u(i, k) = v[3];
            t.w(i, k) = v[4];
            t.psi(i, k) = v[5];
            t.xi(i, k) = v[6];
        }
    }
    return t;
}

namespace {

constexpr double kTimeEps = 1e-9;

std::string snapshot_name(double t)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_t%07.3f.csv", t);
    return buf;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

RunResult run(const ScenarioConfig& scenario, const StepObserver& observer)
{
    scenario.validate();
    const Grid grid = scenario.grid();
    std::vector<std::string> warnings;
    State initial =
        gaussian_vortex_init(grid, scenario.profile, scenario.vortex, scenario.solver, &warnings);
    RunResult r = run(scenario, std::move(initial), observer);
    r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
    return r;
}

RunResult run(const ScenarioConfig& scenario, State state, const StepObserver& observer)
{
    scenario.validate();
    const Grid grid = scenario.grid();
    if (!state.rho.matches(grid)) {
        throw ConfigurationError("initial state does not match the scenario grid");
    }

    RunResult r;
    r.scenario = scenario;

    std::vector<double> targets = scenario.snapshot_times;
    targets.push_back(scenario.t_end);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end(),
                              [](double a, double b) { return std::abs(a - b) < kTimeEps; }),
                  targets.end());

    const bool exponential = scenario.profile.kind == ProfileKind::Exponential;
    auto sample = [&](const State& s) {
        if (!r.series.empty() && !(s.t > r.series.back().t)) {
            return;
        }
        r.series.push_back(sample_functionals(s, grid, scenario.profile));
        r.max_abs_vorticity.push_back(max_abs(vorticity_nodes(s, grid).values()));
        if (exponential) {
            const Field e = wave_energy_density(s, grid, scenario.profile);
            r.min_wave_energy.push_back(*std::min_element(e.values().begin(), e.values().end()));
        } else {
            r.min_wave_energy.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        r.max_divergence.push_back(max_abs_divergence(s, grid));
    };

    Integrator integrator(grid, scenario.solver, scenario.profile);
    integrator.set_reference_speed(max_speed(state));

    sample(state);
    std::size_t next = 0;
    auto take_snapshots = [&](const State& s) {
        while (next < targets.size() && std::abs(targets[next] - s.t) < kTimeEps) {
            const bool listed =
                std::any_of(scenario.snapshot_times.begin(), scenario.snapshot_times.end(),
                            [&](double t) { return std::abs(t - targets[next]) < kTimeEps; });
            if (listed || std::abs(targets[next] - scenario.t_end) < kTimeEps) {
                sample(s);
                r.snapshots.push_back(make_snapshot(s, grid, scenario.solver));
            }
            ++next;
        }
    };
    take_snapshots(state);

    Snapshot last_good{state, Field(grid, Placement::Node), Field(grid, Placement::Node)};
    try {
        while (next < targets.size()) {
            const double target = targets[next];
            State s = integrator.step(state, target - state.t);
            if (std::abs(s.t - target) < kTimeEps) {
                s.t = target;
            }
            state = std::move(s);
            if (observer) {
                observer(state);
            }
            if (integrator.steps_taken() % scenario.diag_interval == 0) {
                sample(state);
            }
            take_snapshots(state);
        }
    } catch (const NumericBlowup& e) {
        last_good = make_snapshot(state, grid, scenario.solver);
        throw RunFailure(scenario.name + ": " + e.what(), std::move(last_good),
                         std::move(r.series));
    }
    sample(state);
    r.steps = integrator.steps_taken();
    r.verdict = admissibility_report(r.series);

    if (!scenario.output_dir.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(scenario.output_dir) / scenario.name;
        fs::create_directories(dir);
        const std::string diag = (dir / "diagnostics.csv").string();
        write_diagnostics_csv(diag, r.series);
        r.written_files.push_back(diag);
        for (const Snapshot& snap : r.snapshots) {
            const std::string path = (dir / snapshot_name(snap.state.t)).string();
            write_snapshot(snap, grid, path);
            r.written_files.push_back(path);
        }
        const std::string cfg_path = (dir / "scenario.cfg").string();
        std::ofstream cfg_out(cfg_path);
        cfg_out << format_config(scenario);
        r.written_files.push_back(cfg_path);
    }
    return r;
}

namespace {

SweepEntry summarise(const std::string& name, const ScenarioConfig& cfg)
{
    SweepEntry e;
    e.name = name;
    e.H = cfg.profile.kind == ProfileKind::Exponential ? cfg.profile.H
                                                       : std::numeric_limits<double>::infinity();
    e.mixing_at_7 = std::numeric_limits<double>::quiet_NaN();
    try {
        e.result = run(cfg);
        e.ok = true;
        e.verdict = e.result.verdict;
        const auto& series = e.result.series;
        for (const FunctionalSample& s : series) {
            if (std::abs(s.t - 7.0) < kTimeEps) {
                e.mixing_at_7 = s.mixing_fraction;
            }
        }
        const double f0 = series.front().F;
        // A uniform fluid at rho00 has F = 0 and nothing to normalise by.
        e.F_decay = std::abs(f0) > 1e-12 * series.front().mass
                        ? (f0 - series.back().F) / std::abs(f0)
                        : std::numeric_limits<double>::quiet_NaN();
    } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
    }
    return e;
}

} // namespace

std::vector<SweepEntry> run_sweep(const std::vector<std::string>& names, const Overrides& overrides)
{
    std::vector<SweepEntry> entries;
    std::vector<std::future<SweepEntry>> jobs;
    for (const std::string& name : names) {
        ScenarioConfig cfg;
        try {
            cfg = apply_overrides(preset(name), overrides);
            cfg.validate();
        } catch (const std::exception& ex) {
            SweepEntry e;
            e.name = name;
            e.H = std::numeric_limits<double>::quiet_NaN();
            e.mixing_at_7 = std::numeric_limits<double>::quiet_NaN();
            e.error = ex.what();
            entries.push_back(std::move(e));
            continue;
        }
        jobs.push_back(std::async(std::launch::async, summarise, name, cfg));
    }
    for (auto& job : jobs) {
        entries.push_back(job.get());
    }
    std::stable_sort(entries.begin(), entries.end(), [](const SweepEntry& a, const SweepEntry& b) {
        // NaN (configuration failures) sort last.
        if (std::isnan(a.H) || std::isnan(b.H)) return !std::isnan(a.H) && std::isnan(b.H);
        return a.H < b.H;
    });
    return entries;
}

std::string format_sweep_table(const std::vector<SweepEntry>& entries)
{
    std::ostringstream o;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %10s %14s %12s  %s\n", "scenario", "H [m]",
                  "mixing(7 s)", "F decay", "status");
    o << line;
    for (const SweepEntry& e : entries) {
        std::string status = e.ok ? (e.verdict.all_passed() ? "admissible" : "NOT admissible")
                                  : "error: " + e.error;
        std::snprintf(line, sizeof line, "%-12s %10.4g %14.6f %12.4e  %s\n", e.name.c_str(), e.H,
                      e.mixing_at_7, e.F_decay, status.c_str());
        o << line;
    }
    return o.str();
}

} // namespace stratflow
