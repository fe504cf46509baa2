#include "helpers.hpp"

#include "stratflow/diagnostics.hpp"
#include "stratflow/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

using namespace stratflow;

namespace {

const StratificationProfile kBase = StratificationProfile::exponential(1000.0, 6.23);

// Closed-form integrals over the 1.0 x 0.25 column for the exponential background.
double column_mass(double H, double D) { return 1000.0 * H * (1.0 - std::exp(-D / H)); }
double column_moment(double H, double D)
{
    return 1000.0 * (H * H * (1.0 - std::exp(-D / H)) - H * D * std::exp(-D / H));
}

State perturbed(const Grid& g, unsigned seed, double eta_amp, double vel)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> de(-eta_amp, eta_amp);
    std::uniform_real_distribution<double> dv(-vel, vel);
    State s = testing::rest_state(g, kBase);
    for (int k = 0; k < g.nz; ++k)
        for (int i = 0; i < g.nx; ++i) s.rho(i, k) *= 1.0 + de(rng);
    for (double& v : s.u.values()) v = dv(rng);
    for (double& v : s.w.values()) v = dv(rng);
    apply_wall_bc(s);
    return s;
}

} // namespace

TEST_CASE("mass")
{
    const Grid g = testing::desk_grid();
    State s(g);
    s.rho.fill(1000.0);
    CHECK(mass(s, g) == doctest::Approx(250.0).epsilon(1e-14));

    const State rest = testing::rest_state(g, kBase);
    CHECK(column_mass(6.23, 0.25) == doctest::Approx(245.050376284120196).epsilon(1e-14));
    CHECK(mass(rest, g) == doctest::Approx(column_mass(6.23, 0.25)).epsilon(1e-7));
    CHECK(mass(rest, g) == doctest::Approx(245.05).epsilon(1e-5));
}

TEST_CASE("hydrodynamic energy")
{
    const Grid g = testing::desk_grid();
    const State rest = testing::rest_state(g, kBase);
    const double closed = kGravity * column_moment(6.23, 0.25);
    CHECK(closed == doctest::Approx(298.483359929979933).epsilon(1e-13));
    // Cell sums are midpoint rules; the leading error term is
    // -(h^2/24) [f']_0^D with f(z) = g rho0(z) z, per unit width.
    const double h2 = g.h * g.h;
    auto df = [](double z) { return rho0_unchecked(kBase, z) * (1.0 - z / 6.23); };
    const double midpoint = closed - kGravity * g.width * h2 / 24.0 * (df(0.25) - df(0.0));
    CHECK(hydro_energy(rest, g) == doctest::Approx(midpoint).epsilon(1e-9));
    CHECK(hydro_energy(rest, g) == doctest::Approx(closed).epsilon(1e-5));
    CHECK(kinetic_energy(rest, g) == 0.0);

    State s(g);
    s.rho.fill(1000.0);
    s.u.fill(0.3);
    s.w.fill(0.4);
    const double area = 0.25;
    CHECK(kinetic_energy(s, g) == doctest::Approx(1000.0 * 0.25 / 2.0 * area).epsilon(1e-13));
    CHECK(hydro_energy(s, g) ==
          doctest::Approx(1000.0 * 0.25 / 2.0 * area + 1000.0 * kGravity * area * 0.25 / 2.0).epsilon(1e-13));
}

TEST_CASE("kinetic energy equals the face-based sum for closed walls")
{
    const Grid g = testing::small_grid();
    const State s = testing::random_state(g, 21);
    const Field fx = face_density_x(s.rho);
    const Field fz = face_density_z(s.rho);
    double faces = 0.0;
    for (std::size_t n = 0; n < s.u.size(); ++n) faces += 0.5 * fx.values()[n] * s.u.values()[n] * s.u.values()[n];
    for (std::size_t n = 0; n < s.w.size(); ++n) faces += 0.5 * fz.values()[n] * s.w.values()[n] * s.w.values()[n];
    CHECK(kinetic_energy(s, g) == doctest::Approx(faces * g.cell_area()).epsilon(1e-13));
}

TEST_CASE("nonlinear wave energy")
{
    const Grid g = testing::desk_grid();
    const State rest = testing::rest_state(g, kBase);
    CHECK(std::abs(wave_energy_nonlinear(rest, g, kBase)) <= 1e-12);

    State s = rest;
    for (double& r : s.rho.values()) r *= 1.0 + 1e-3;
    const double hn = wave_energy_nonlinear(s, g, kBase);
    const double hl = wave_energy_linear(s, g, kBase);
    CHECK(hn > 0.0);
    CHECK(std::abs(hn - hl) <= 2e-3 * hl);

    const State p = perturbed(g, 4, 0.05, 0.1);
    CHECK(wave_energy_nonlinear(p, g, kBase) > 0.0);
}

TEST_CASE("nonlinear wave energy domain errors")
{
    const Grid g = testing::small_grid();
    State s = testing::rest_state(g, kBase);
    s.rho(2, 2) = 0.0;
    CHECK_THROWS_AS(wave_energy_nonlinear(s, g, kBase), DomainError);
    const State ok = testing::rest_state(g, kBase);
    CHECK_THROWS_AS(wave_energy_nonlinear(ok, g, StratificationProfile::constant(1000.0)), DomainError);
}

TEST_CASE("wave energy integrand is non-negative cell by cell")
{
    const Grid g = testing::small_grid();
    for (unsigned seed = 0; seed < 20; ++seed) {
        const double amp = seed < 10 ? 1e-6 * std::pow(10.0, seed % 7) : 0.9;
        const State s = perturbed(g, seed, amp, seed % 2 ? 0.0 : 0.3);
        const Field e = wave_energy_density(s, g, kBase);
        for (double v : e.values()) CHECK(v >= 0.0);
    }
}

TEST_CASE("wave energy decomposes into hydrodynamic energy and F")
{
    // H_nonl = E + g H (F + sum (rho0 - rho) h^2).
    const Grid g = testing::small_grid();
    for (unsigned seed : {1u, 2u, 3u}) {
        const State s = perturbed(g, seed, 0.02, 0.2);
        double excess = 0.0;
        for (int k = 0; k < g.nz; ++k)
            for (int i = 0; i < g.nx; ++i) excess += rho0_unchecked(kBase, g.zc(k)) - s.rho(i, k);
        excess *= g.cell_area();
        const double E = hydro_energy(s, g);
        const double F = f_functional(s, g, kBase.rho00);
        const double rhs = E + kGravity * kBase.H * (F + excess);
        const double scale = std::abs(E) + std::abs(kGravity * kBase.H * F);
        CHECK(std::abs(wave_energy_nonlinear(s, g, kBase) - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("small-amplitude limit of the wave energy")
{
    // (1 + eta) ln(1 + eta) - eta = eta^2/2 - eta^3/6 + ..., so the relative
    // gap to the quadratic form is about |eta|/3. Frozen bound C = 0.34.
    const Grid g = testing::small_grid();
    for (double amp : {1e-2, 3e-3, 1e-3, 1e-4}) {
        const State s = perturbed(g, 9, amp, 0.0);
        const double hn = wave_energy_nonlinear(s, g, kBase);
        const double hl = wave_energy_linear(s, g, kBase);
        CHECK(std::abs(hn - hl) <= 0.34 * amp * hl);
    }
}

TEST_CASE("linear energies")
{
    const Grid g = testing::small_grid();
    const State rest = testing::rest_state(g, kBase);
    CHECK(wave_energy_linear(rest, g, kBase) == 0.0);
    CHECK(hydro_energy_linear(rest, g, kBase) == 0.0);

    const double eps = 2e-3;
    State s = rest;
    double background = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            s.rho(i, k) = rest.rho(i, k) * (1.0 + eps);
            background += rest.rho(i, k);
        }
    }
    background *= g.cell_area();
    CHECK(wave_energy_linear(s, g, kBase) ==
          doctest::Approx(0.5 * kGravity * kBase.H * eps * eps * background).epsilon(1e-9));
}

TEST_CASE("F functional")
{
    const Grid g = testing::desk_grid();
    State s(g);
    s.rho.fill(1000.0);
    CHECK(f_functional(s, g, 1000.0) == 0.0);

    const State rest = testing::rest_state(g, kBase);
    const double closed = -column_moment(6.23, 0.25) / 6.23;
    CHECK(closed == doctest::Approx(-4.88385847850704203).epsilon(1e-13));
    // Same midpoint correction with f(z) = -rho0(z) z / H.
    auto df = [](double z) { return -rho0_unchecked(kBase, z) * (1.0 - z / 6.23) / 6.23; };
    const double midpoint = closed - g.width * g.h * g.h / 24.0 * (df(0.25) - df(0.0));
    CHECK(f_functional(rest, g, 1000.0) == doctest::Approx(midpoint).epsilon(1e-9));
    CHECK(f_functional(rest, g, 1000.0) == doctest::Approx(closed).epsilon(1e-5));
    CHECK(f_functional(rest, g, 1000.0) == doctest::Approx(-4.885).epsilon(5e-4));

    s.rho(3, 3) = -1.0;
    CHECK_THROWS_AS(f_functional(s, g, 1000.0), DomainError);
}

TEST_CASE("F is non-positive whenever rho <= rho00")
{
    const Grid g = testing::small_grid();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dr(1.0, 1000.0);
    for (int trial = 0; trial < 10; ++trial) {
        State s(g);
        for (double& r : s.rho.values()) r = dr(rng);
        CHECK(f_functional(s, g, 1000.0) <= 0.0);
    }
}

TEST_CASE("mixing fraction")
{
    const Grid g = make_grid(0.4, 0.44, 0.04);  // 10 x 11 cells, 100 vertical pairs
    State s(g);
    for (int k = 0; k < g.nz; ++k)
        for (int i = 0; i < g.nx; ++i) s.rho(i, k) = 1000.0 - k;
    CHECK(mixing_fraction(s, g) == 0.0);
    for (int k = 0; k < g.nz; ++k) s.rho(0, k) = 990.0 + k;
    CHECK(mixing_fraction(s, g) == doctest::Approx(0.10));

    State flat(g);
    flat.rho.fill(1000.0);
    flat.rho(4, 5) += 1e-10;
    CHECK(mixing_fraction(flat, g) == 0.0);
}

TEST_CASE("monotone check locates the worst rise")
{
    const std::vector<double> v{5.0, 4.0, 4.5, 3.0, 3.2, 2.0};
    const Check c = monotone_non_increasing(v, 0.1);
    CHECK_FALSE(c.passed);
    CHECK(c.worst == doctest::Approx(0.5));
    CHECK(c.index == 2);
    CHECK(monotone_non_increasing(v, 0.6).passed);
}

TEST_CASE("admissibility report")
{
    std::vector<FunctionalSample> series(6);
    for (std::size_t j = 0; j < series.size(); ++j) {
        series[j] = FunctionalSample{static_cast<double>(j), 245.0, 0.2, 300.0, 0.2, 0.2, 0.0, -4.9, 0.0};
    }
    CHECK(admissibility_report(series).all_passed());

    const AdmissibilityTolerances tol;
    auto bumped = series;
    bumped[3].F += 10.0 * tol.f_rel * std::abs(series[0].F);
    const AdmissibilityVerdict v = admissibility_report(bumped, tol);
    CHECK_FALSE(v.F_monotone.passed);
    CHECK(v.F_monotone.index == 3);
    CHECK(v.energy_conserved.passed);

    auto drift = series;
    drift[4].hydro_energy += 0.03 * 0.2;
    CHECK_FALSE(admissibility_report(drift).energy_conserved.passed);
    auto leak = series;
    leak[5].mass *= 1.0 + 1e-9;
    CHECK_FALSE(admissibility_report(leak).mass_conserved.passed);

    auto backwards = series;
    backwards[2].t = backwards[1].t;
    CHECK_THROWS_AS(admissibility_report(backwards), InputError);
    CHECK_THROWS_AS(admissibility_report(std::vector<FunctionalSample>{}), InputError);
}

TEST_CASE("diagnostics csv round trip")
{
    std::vector<FunctionalSample> series;
    for (int j = 0; j < 4; ++j) {
        FunctionalSample s;
        s.t = 0.1 * j;
        s.mass = 245.05 + 1e-13 * j;
        s.hydro_energy = 298.7 - 1e-9 * j;
        s.H_nonl = 0.236 - 1e-5 * j;
        s.H_lin = 0.2361;
        s.F = -4.8838 - 1e-7 * j;
        s.mixing_fraction = 0.01 * j;
        s.kinetic = 0.2;
        series.push_back(s);
    }
    const auto path = (std::filesystem::temp_directory_path() / "stratflow_diag_test.csv").string();
    write_diagnostics_csv(path, series);
    const auto back = read_diagnostics_csv(path);
    REQUIRE(back.size() == series.size());
    for (std::size_t j = 0; j < series.size(); ++j) {
        CHECK(back[j].t == series[j].t);
        CHECK(back[j].mass == series[j].mass);
        CHECK(back[j].hydro_energy == series[j].hydro_energy);
        CHECK(back[j].H_nonl == series[j].H_nonl);
        CHECK(back[j].F == series[j].F);
        CHECK(back[j].mixing_fraction == series[j].mixing_fraction);
        CHECK(std::isnan(back[j].kinetic));
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_diagnostics_csv(path), InputError);
}
