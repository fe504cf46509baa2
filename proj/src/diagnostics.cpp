#include "stratflow/diagnostics.hpp"

#include "stratflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace stratflow {

namespace {

double speed2_cell(const State& s, int i, int k)
{
    const double u0 = s.u(i, k);
    const double u1 = s.u(i + 1, k);
    const double w0 = s.w(i, k);
    const double w1 = s.w(i, k + 1);
    return 0.5 * (u0 * u0 + u1 * u1 + w0 * w0 + w1 * w1);
}

void require_exponential(const StratificationProfile& profile)
{
    if (profile.kind != ProfileKind::Exponential) {
        throw DomainError("wave energy functionals need an exponential background profile");
    }
}

// (1 + eta) ln(1 + eta) - eta, accurate for small eta.
double potential_kernel(double eta)
{
    if (std::abs(eta) < 1e-3) {
        const double e2 = eta * eta;
        return e2 * (0.5 - eta / 6.0 + e2 / 12.0 - e2 * eta / 20.0);
    }
    return (1.0 + eta) * std::log1p(eta) - eta;
}

} // namespace

double mass(const State& state, const Grid& grid)
{
    double sum = 0.0;
    for (double r : state.rho.values()) {
        sum += r;
    }
    return sum * grid.cell_area();
}

double kinetic_energy(const State& state, const Grid& grid)
{
    double sum = 0.0;
    for (int k = 0; k < grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            sum += state.rho(i, k) * 0.5 * speed2_cell(state, i, k);
        }
    }
    return sum * grid.cell_area();
}

double hydro_energy(const State& state, const Grid& grid)
{
    double sum = 0.0;
    for (int k = 0; k < grid.nz; ++k) {
        const double z = grid.zc(k);
        for (int i = 0; i < grid.nx; ++i) {
            const double r = state.rho(i, k);
            sum += r * (0.5 * speed2_cell(state, i, k) + kGravity * z);
        }
    }
    return sum * grid.cell_area();
}

Field wave_energy_density(const State& state, const Grid& grid,
                          const StratificationProfile& profile)
{
    require_exponential(profile);
    Field e(grid, Placement::Cell);
    const double gH = kGravity * profile.H;
    for (int k = 0; k < grid.nz; ++k) {
        const double r0 = rho0_unchecked(profile, grid.zc(k));
        for (int i = 0; i < grid.nx; ++i) {
            const double r = state.rho(i, k);
            if (!(r > 0.0)) {
                throw DomainError("wave energy requires rho > 0");
            }
            const double eta = r / r0 - 1.0;
            e(i, k) = r * 0.5 * speed2_cell(state, i, k) + gH * r0 * potential_kernel(eta);
        }
    }
    return e;
}

double wave_energy_nonlinear(const State& state, const Grid& grid,
                             const StratificationProfile& profile)
{
    const Field e = wave_energy_density(state, grid, profile);
    double sum = 0.0;
    for (double v : e.values()) {
        sum += v;
    }
    return sum * grid.cell_area();
}

double wave_energy_linear(const State& state, const Grid& grid,
                          const StratificationProfile& profile)
{
    require_exponential(profile);
    const double gH = kGravity * profile.H;
    double sum = 0.0;
    for (int k = 0; k < grid.nz; ++k) {
        const double r0 = rho0_unchecked(profile, grid.zc(k));
        for (int i = 0; i < grid.nx; ++i) {
            const double phi = state.rho(i, k) / r0 - 1.0;
            sum += r0 * (speed2_cell(state, i, k) + gH * phi * phi);
        }
    }
    return 0.5 * sum * grid.cell_area();
}

double hydro_energy_linear(const State& state, const Grid& grid,
                           const StratificationProfile& profile)
{
    double sum = 0.0;
    for (int k = 0; k < grid.nz; ++k) {
        const double z = grid.zc(k);
        const double r0 = rho0_unchecked(profile, z);
        for (int i = 0; i < grid.nx; ++i) {
            const double phi = state.rho(i, k) / r0 - 1.0;
            sum += r0 * (0.5 * speed2_cell(state, i, k) + kGravity * z * phi);
        }
    }
    return sum * grid.cell_area();
}

double f_functional(const State& state, const Grid& grid, double rho00)
{
    double sum = 0.0;
    for (double r : state.rho.values()) {
        if (!(r > 0.0)) {
            throw DomainError("F functional requires rho > 0");
        }
        sum += r * std::log(r / rho00);
    }
    return sum * grid.cell_area();
}

double mixing_fraction(const State& state, const Grid& grid, double rel_tol)
{
    long unstable = 0;
    for (int k = 0; k + 1 < grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            if (state.rho(i, k + 1) - state.rho(i, k) > rel_tol * state.rho(i, k)) {
                ++unstable;
            }
        }
    }
    return static_cast<double>(unstable) / (static_cast<double>(grid.nx) * (grid.nz - 1));
}

FunctionalSample sample_functionals(const State& state, const Grid& grid,
                                    const StratificationProfile& profile)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    FunctionalSample s;
    s.t = state.t;
    s.mass = mass(state, grid);
    s.kinetic = kinetic_energy(state, grid);
    s.hydro_energy = hydro_energy(state, grid);
    const bool exponential = profile.kind == ProfileKind::Exponential;
    s.H_nonl = exponential ? wave_energy_nonlinear(state, grid, profile) : nan;
    s.H_lin = exponential ? wave_energy_linear(state, grid, profile) : nan;
    s.E_lin = hydro_energy_linear(state, grid, profile);
    s.F = f_functional(state, grid, profile.rho00);
    s.mixing_fraction = mixing_fraction(state, grid);
    return s;
}

Check monotone_non_increasing(std::span<const double> values, double tol)
{
    Check c;
    if (values.empty()) {
        return c;
    }
    double running_min = values[0];
    for (std::size_t j = 1; j < values.size(); ++j) {
        const double excess = values[j] - running_min;
        if (excess > c.worst) {
            c.worst = excess;
            c.index = static_cast<long>(j);
        }
        running_min = std::min(running_min, values[j]);
    }
    c.passed = c.worst <= tol;
    return c;
}

AdmissibilityVerdict admissibility_report(std::span<const FunctionalSample> series,
                                          const AdmissibilityTolerances& tol)
{
    if (series.empty()) {
        throw InputError("admissibility report needs a non-empty series");
    }
    for (std::size_t j = 1; j < series.size(); ++j) {
        if (!(series[j].t > series[j - 1].t)) {
            throw InputError("sample times must increase strictly (sample " + std::to_string(j) +
                             ")");
        }
    }
    const FunctionalSample& first = series.front();
    AdmissibilityVerdict v;

    const double scale = (first.kinetic > 0.0 && std::isfinite(first.kinetic))
                             ? first.kinetic
                             : std::abs(first.H_nonl);
    for (std::size_t j = 0; j < series.size(); ++j) {
        const double drift = std::abs(series[j].hydro_energy - first.hydro_energy) /
                             (scale > 0.0 ? scale : 1.0);
        if (drift > v.energy_conserved.worst) {
            v.energy_conserved.worst = drift;
            v.energy_conserved.index = static_cast<long>(j);
        }
        const double mdrift = std::abs(series[j].mass - first.mass) / first.mass;
        if (mdrift > v.mass_conserved.worst) {
            v.mass_conserved.worst = mdrift;
            v.mass_conserved.index = static_cast<long>(j);
        }
    }
    v.energy_conserved.passed = v.energy_conserved.worst <= tol.energy;
    v.mass_conserved.passed = v.mass_conserved.worst <= tol.mass;

    std::vector<double> f(series.size());
    std::vector<double> hn(series.size());
    double h_max = 0.0;
    bool h_defined = false;
    for (std::size_t j = 0; j < series.size(); ++j) {
        f[j] = series[j].F;
        hn[j] = series[j].H_nonl;
        if (std::isfinite(hn[j])) {
            h_defined = true;
            h_max = std::max(h_max, hn[j]);
        }
    }
    v.F_monotone = monotone_non_increasing(f, tol.f_rel * std::abs(first.F));
    if (h_defined) {
        v.H_nonl_monotone = monotone_non_increasing(hn, tol.h_rel * h_max);
    }
    return v;
}

namespace {

const char* kDiagHeader = "t,mass,hydro_energy,H_nonl,H_lin,F,mixing_fraction";

} // namespace

void write_diagnostics_csv(const std::string& path, std::span<const FunctionalSample> series)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << kDiagHeader << '\n';
    char line[512];
    for (const FunctionalSample& s : series) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                      s.mass, s.hydro_energy, s.H_nonl, s.H_lin, s.F, s.mixing_fraction);
        out << line;
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

std::vector<FunctionalSample> read_diagnostics_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind(kDiagHeader, 0) != 0) {
        throw InputError(path + ": expected header '" + kDiagHeader + "'");
    }
    std::vector<FunctionalSample> series;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double v[7];
        int n = 0;
        while (n < 7 && std::getline(row, cell, ',')) {
            try {
                v[n++] = std::stod(cell);
            } catch (const std::exception&) {
                throw InputError(path + ":" + std::to_string(line_no) + ": bad number '" + cell +
                                 "'");
            }
        }
        if (n != 7) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected 7 columns");
        }
        FunctionalSample s;
        s.t = v[0];
        s.mass = v[1];
        s.hydro_energy = v[2];
        s.H_nonl = v[3];
        s.H_lin = v[4];
        s.F = v[5];
        s.mixing_fraction = v[6];
        s.kinetic = std::numeric_limits<double>::quiet_NaN();
        s.E_lin = std::numeric_limits<double>::quiet_NaN();
        series.push_back(s);
    }
    return series;
}

std::string describe(const AdmissibilityVerdict& v)
{
    char buf[640];
    auto tag = [](const Check& c) { return c.passed ? "pass" : "FAIL"; };
    std::snprintf(buf, sizeof buf,
                  "energy_conserved  %s  max drift %.3e (sample %ld)\n"
                  "F_monotone        %s  max rise  %.3e (sample %ld)\n"
                  "H_nonl_monotone   %s  max rise  %.3e (sample %ld)\n"
                  "mass_conserved    %s  max drift %.3e (sample %ld)\n",
                  tag(v.energy_conserved), v.energy_conserved.worst, v.energy_conserved.index,
                  tag(v.F_monotone), v.F_monotone.worst, v.F_monotone.index,
                  tag(v.H_nonl_monotone), v.H_nonl_monotone.worst, v.H_nonl_monotone.index,
                  tag(v.mass_conserved), v.mass_conserved.worst, v.mass_conserved.index);
    return buf;
}

} // namespace stratflow
