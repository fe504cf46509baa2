// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Tolerances are the stated ones; nothing here is
// tuned to the outcome.

#include "stratflow/analytic.hpp"
#include "stratflow/diagnostics.hpp"
#include "stratflow/errors.hpp"
#include "stratflow/experiments.hpp"
#include "stratflow/poisson.hpp"
#include "stratflow/scenario.hpp"
#include "stratflow/stratification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <string>
#include <vector>

using namespace stratflow;

namespace {

int failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("%s  [%2d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Samples of a series with t <= t_max.
std::vector<FunctionalSample> up_to(const std::vector<FunctionalSample>& s, double t_max)
{
    std::vector<FunctionalSample> out;
    for (const auto& x : s) {
        if (x.t <= t_max + 1e-12) out.push_back(x);
    }
    return out;
}

const FunctionalSample* at(const std::vector<FunctionalSample>& s, double t)
{
    for (const auto& x : s) {
        if (std::abs(x.t - t) < 1e-9) return &x;
    }
    return nullptr;
}

const Snapshot* snapshot_at(const RunResult& r, double t)
{
    for (const auto& s : r.snapshots) {
        if (std::abs(s.state.t - t) < 1e-9) return &s;
    }
    return nullptr;
}

template <typename Get>
std::vector<double> column(const std::vector<FunctionalSample>& s, Get get)
{
    std::vector<double> v;
    for (const auto& x : s) v.push_back(get(x));
    return v;
}

ScenarioConfig desk(const std::string& name, double t_end)
{
    Overrides o;
    o.h = 0.005;
    o.t_end = t_end;
    o.output_dir = "";
    return apply_overrides(preset(name), o);
}

// ---------------------------------------------------------------------------
// Criterion 5: small-amplitude standing wave in a square tank.

struct WaveResult {
    double omega_measured = 0.0;
    double omega_theory = 0.0;
    double max_speed0 = 0.0;
    double c = 0.0;
    double worst_drift_per_period = 0.0;
    int crossings = 0;
};

WaveResult standing_wave()
{
    ScenarioConfig c;
    c.name = "standing-wave";
    c.width = 0.25;
    c.height = 0.25;
    c.h = 0.005;
    c.vortex.x0 = 0.125;
    c.vortex.z0 = 0.125;
    c.diag_interval = 1;
    c.snapshot_times.clear();
    c.output_dir.clear();

    const Grid g = c.grid();
    const double N = buoyancy_frequency(c.profile);
    const double kx = std::numbers::pi / c.width;
    const double kz = std::numbers::pi / c.height;
    WaveResult w;
    w.c = max_linear_phase_speed(c.profile, c.height);
    w.omega_theory = N * kx / std::hypot(kx, kz);
    const double period = 2.0 * std::numbers::pi / w.omega_theory;
    c.t_end = 2.25 * period;

    // Largest velocity of psi = A sin sin is |A| max(kx, kz); keep a margin.
    const double A = 0.9 * 1e-3 * w.c / std::max(kx, kz);
    State s0 = standing_wave_init(g, c.profile, A);
    w.max_speed0 = max_speed(s0);

    // Modal amplitude of u, proportional to cos(omega t) for the linear mode.
    auto amplitude = [&](const State& s) {
        double a = 0.0;
        for (int k = 0; k < g.nz; ++k) {
            for (int i = 1; i < g.nx; ++i) {
                a += s.u(i, k) * std::sin(kx * g.xf(i)) * std::cos(kz * g.zc(k));
            }
        }
        return a;
    };
    std::vector<double> ts{0.0};
    std::vector<double> as{amplitude(s0)};
    const RunResult r = run(c, s0, [&](const State& s) {
        ts.push_back(s.t);
        as.push_back(amplitude(s));
    });

    std::vector<double> zeros;
    for (std::size_t n = 1; n < as.size(); ++n) {
        if ((as[n - 1] > 0.0) != (as[n] > 0.0)) {
            const double f = as[n - 1] / (as[n - 1] - as[n]);
            zeros.push_back(ts[n - 1] + f * (ts[n] - ts[n - 1]));
        }
    }
    w.crossings = static_cast<int>(zeros.size());
    if (zeros.size() >= 2) {
        const double half = (zeros.back() - zeros.front()) / static_cast<double>(zeros.size() - 1);
        w.omega_measured = std::numbers::pi / half;
    }

    // H_lin drift per buoyancy period: largest change over any window of one
    // buoyancy period, relative to H_lin(0).
    const double Tb = 2.0 * std::numbers::pi / N;
    const auto& ser = r.series;
    const double H0 = ser.front().H_lin;
    for (std::size_t a = 0; a < ser.size(); ++a) {
        for (std::size_t b = a + 1; b < ser.size() && ser[b].t - ser[a].t <= Tb + 1e-12; ++b) {
            w.worst_drift_per_period =
                std::max(w.worst_drift_per_period, std::abs(ser[b].H_lin - ser[a].H_lin) / H0);
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Criterion 8: relative L2 difference of rho between h and h/2 at 3 s, the
// fine field restricted onto the coarse cells by 2x2 averaging.

struct Refinement {
    double rho_rel = 0.0;  // ||rho_c - R rho_f|| / ||R rho_f||
    double phi_rel = 0.0;  // same for rho - rho0
};

Refinement compare_grids(const Snapshot& coarse, const Grid& gc, const Snapshot& fine,
                         const Grid& gf, const StratificationProfile& profile)
{
    Refinement out;
    double d_rho = 0.0, n_rho = 0.0, d_phi = 0.0, n_phi = 0.0;
    for (int k = 0; k < gc.nz; ++k) {
        for (int i = 0; i < gc.nx; ++i) {
            double rf = 0.0, bf = 0.0;
            for (int dk = 0; dk < 2; ++dk) {
                for (int di = 0; di < 2; ++di) {
                    rf += 0.25 * fine.state.rho(2 * i + di, 2 * k + dk);
                    bf += 0.25 * rho0(profile, gf.zc(2 * k + dk), gf.height);
                }
            }
            const double rc = coarse.state.rho(i, k);
            const double bc = rho0(profile, gc.zc(k), gc.height);
            d_rho += (rc - rf) * (rc - rf);
            n_rho += rf * rf;
            const double pc = rc - bc;
            const double pf = rf - bf;
            d_phi += (pc - pf) * (pc - pf);
            n_phi += pf * pf;
        }
    }
    out.rho_rel = std::sqrt(d_rho / n_rho);
    out.phi_rel = std::sqrt(d_phi / n_phi);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 10: manufactured solution cos(pi x) cos(pi z), beta = 1/rho(z).

double mms_error(int n)
{
    const Grid g = make_grid(1.0, 1.0, 1.0 / n);
    Field beta(g, Placement::Cell);
    Field rhs(g, Placement::Cell);
    Field exact(g, Placement::Cell);
    const double pi = std::numbers::pi;
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.xc(i);
            const double z = g.zc(k);
            const double rho = 1000.0 - 300.0 * z;
            const double phi = std::cos(pi * x) * std::cos(pi * z);
            beta(i, k) = 1.0 / rho;
            exact(i, k) = phi;
            rhs(i, k) = -2.0 * pi * pi * phi / rho +
                        300.0 / (rho * rho) * (-pi * std::cos(pi * x) * std::sin(pi * z));
        }
    }
    double mean = 0.0;
    for (double r : rhs.values()) mean += r;
    mean /= static_cast<double>(rhs.size());
    for (double& r : rhs.values()) r -= mean;

    SolverConfig cfg;
    cfg.poisson_tol = 1e-12;
    const Field phi = solve_variable_poisson(beta, rhs, g, cfg);
    double me = 0.0;
    for (double v : exact.values()) me += v;
    me /= static_cast<double>(exact.size());
    double err = 0.0;
    for (std::size_t c = 0; c < phi.size(); ++c) {
        err = std::max(err, std::abs(phi.values()[c] - (exact.values()[c] - me)));
    }
    return err;
}

} // namespace

int main()
{
    const auto start = std::chrono::steady_clock::now();

    // Long runs, started together. The baseline desk run goes to 9 s so it
    // also serves criterion 7; criteria 1 and 2 read its [0, 8] s part.
    const ScenarioConfig baseline = desk("coarse", 9.0);
    const ScenarioConfig half = desk("H-half", 7.0);
    const ScenarioConfig dbl = desk("H-double", 7.0);
    // The constant-density criterion names the preset itself, h = 0.0025.
    ScenarioConfig homog = preset("homogeneous");
    homog.output_dir.clear();
    ScenarioConfig coarse = desk("coarse", 3.0);
    coarse.h = 0.01;

    auto launch = [](const ScenarioConfig& c) {
        return std::async(std::launch::async, [c] {
            const auto t0 = std::chrono::steady_clock::now();
            RunResult r = run(c);
            std::printf("       ran %-12s h=%.4g to %g s: %ld steps, %.1f s\n", c.name.c_str(), c.h,
                        c.t_end, r.steps,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            std::fflush(stdout);
            return r;
        });
    };
    auto f_base = launch(baseline);
    auto f_half = launch(half);
    auto f_dbl = launch(dbl);
    auto f_homog = launch(homog);
    auto f_coarse = launch(coarse);

    // Quick criteria first.
    {
        const auto checks = analytic::oracle_suite();
        bool ok = true;
        std::string detail;
        for (const auto& c : checks) {
            ok = ok && c.passed;
            if (!c.passed) detail += c.name + " (" + c.detail + "); ";
        }
        verdict(9, "analytic oracle suite", ok,
                ok ? fmt("%zu checks passed", checks.size()) : detail);
    }
    {
        const double e1 = mms_error(16);
        const double e2 = mms_error(32);
        const double e3 = mms_error(64);
        const double p1 = std::log2(e1 / e2);
        const double p2 = std::log2(e2 / e3);
        bool rejected = false;
        try {
            const Grid g = make_grid(1.0, 0.5, 0.05);
            (void)solve_variable_poisson(Field(g, Placement::Cell, 1.0),
                                         Field(g, Placement::Cell, 1.0), g, SolverConfig{});
        } catch (const CompatibilityError&) {
            rejected = true;
        }
        const bool ok = p1 > 1.8 && p2 > 1.8 && rejected;
        verdict(10, "Poisson solver", ok,
                fmt("max errors %.3e %.3e %.3e, orders %.3f %.3f; incompatible rhs %s", e1, e2, e3,
                    p1, p2, rejected ? "rejected" : "ACCEPTED"));
    }
    {
        const WaveResult w = standing_wave();
        const double f_err = w.omega_theory > 0 ? std::abs(w.omega_measured / w.omega_theory - 1.0)
                                                : 1.0;
        const double c_err = std::abs(w.c / 0.1 - 1.0);
        const bool ok = w.max_speed0 <= 1e-3 * w.c && w.crossings >= 2 && f_err <= 0.03 &&
                        w.worst_drift_per_period <= 0.01 && c_err <= 0.01;
        verdict(5, "linear standing wave", ok,
                fmt("max|v| %.3e (limit %.3e); omega %.6f vs %.6f (%.3f%%, %d zero crossings); "
                    "H_lin drift per buoyancy period %.3e; N D/pi = %.6f m/s (%.3f%% from 0.1)",
                    w.max_speed0, 1e-3 * w.c, w.omega_measured, w.omega_theory, 100 * f_err,
                    w.crossings, w.worst_drift_per_period, w.c, 100 * c_err));
    }

    const RunResult r_base = f_base.get();
    const RunResult r_half = f_half.get();
    const RunResult r_dbl = f_dbl.get();
    const RunResult r_homog = f_homog.get();
    const RunResult r_coarse = f_coarse.get();

    const auto early = up_to(r_base.series, 8.0);
    {
        const double M0 = early.front().mass;
        double worst = 0.0;
        for (const auto& s : early) worst = std::max(worst, std::abs(s.mass - M0) / M0);
        verdict(1, "mass conservation", worst <= 1e-11,
                fmt("max |M(t) - M(0)|/M(0) = %.3e over %zu samples in [0, 8] s (%ld steps to 9 s)",
                    worst, early.size(), r_base.steps));
    }
    {
        const double E0 = early.front().hydro_energy;
        const double K0 = early.front().kinetic;
        double worst = 0.0;
        for (const auto& s : early) worst = std::max(worst, std::abs(s.hydro_energy - E0));
        verdict(2, "energy condition", worst <= 0.02 * K0,
                fmt("max |E(t) - E(0)| = %.4e J/m = %.3f%% of initial kinetic energy %.4e", worst,
                    100 * worst / K0, K0));
    }
    {
        const auto& ser = r_base.series;
        const double H0 = ser.front().H_nonl;
        const Check mono =
            monotone_non_increasing(column(ser, [](const auto& s) { return s.H_nonl; }), 1e-6 * H0);
        const double min_density =
            *std::min_element(r_base.min_wave_energy.begin(), r_base.min_wave_energy.end());
        const bool ok = mono.passed && H0 > 0.0 && min_density >= 0.0;
        verdict(3, "H_nonl non-increasing", ok,
                fmt("H_nonl(0) = %.6e; worst rise %.3e (allowed %.3e); min cell integrand %.3e",
                    H0, mono.worst, 1e-6 * H0, min_density));
    }
    {
        bool ok = true;
        std::string detail;
        for (const RunResult* r : {&r_base, &r_half, &r_dbl}) {
            const double F0 = r->series.front().F;
            const Check mono = monotone_non_increasing(
                column(r->series, [](const auto& s) { return s.F; }), 1e-6 * std::abs(F0));
            ok = ok && mono.passed;
            detail += fmt("%s rise %.2e (allowed %.2e); ", r->scenario.name.c_str(), mono.worst,
                          1e-6 * std::abs(F0));
        }
        verdict(4, "F non-increasing", ok, detail);
    }
    {
        const double xi0 = r_homog.max_abs_vorticity.front();
        const double xi_max =
            *std::max_element(r_homog.max_abs_vorticity.begin(), r_homog.max_abs_vorticity.end());
        double mix = 0.0;
        for (const auto& s : r_homog.series) mix = std::max(mix, s.mixing_fraction);
        const bool ok = xi_max <= 1.02 * xi0 && mix == 0.0 && r_homog.series.back().t >= 7.0;
        verdict(6, "homogeneous fluid", ok,
                fmt("max|xi| %.5g vs initial %.5g (ratio %.5f); max mixing fraction %g", xi_max,
                    xi0, xi_max / xi0, mix));
    }
    {
        const FunctionalSample* a = at(r_half.series, 7.0);
        const FunctionalSample* b = at(r_base.series, 7.0);
        const FunctionalSample* c = at(r_dbl.series, 7.0);
        const FunctionalSample* d = at(r_base.series, 9.0);
        const bool present = a && b && c && d;
        const bool ok = present && a->mixing_fraction < b->mixing_fraction &&
                        b->mixing_fraction < c->mixing_fraction && d->mixing_fraction >= 0.03 &&
                        d->mixing_fraction <= 0.25;
        verdict(7, "breaking grows with H", ok,
                present ? fmt("mixing at 7 s: H=3.1 %.4f, H=6.23 %.4f, H=12.4 %.4f; H=6.23 at 9 s "
                              "%.4f (band [0.03, 0.25])",
                              a->mixing_fraction, b->mixing_fraction, c->mixing_fraction,
                              d->mixing_fraction)
                        : std::string("missing samples at 7 s or 9 s"));
    }
    {
        const Snapshot* sc = snapshot_at(r_coarse, 3.0);
        const Snapshot* sf = snapshot_at(r_base, 3.0);
        if (!sc || !sf) {
            verdict(8, "grid refinement", false, "missing 3 s snapshots");
        } else {
            const Refinement d =
                compare_grids(*sc, coarse.grid(), *sf, baseline.grid(), baseline.profile);
            verdict(8, "grid refinement", d.rho_rel <= 0.05,
                    fmt("relative L2 of rho, h=0.01 vs h=0.005 at 3 s: %.3e (limit 0.05); "
                        "of rho - rho0: %.3f",
                        d.rho_rel, d.phi_rel));
        }
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d criteria failed; %.1f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
