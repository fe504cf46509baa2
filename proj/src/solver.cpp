#include "stratflow/solver.hpp"

#include "stratflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stratflow {

void SolverConfig::validate() const
{
    if (!(courant > 0.0) || courant > 1.0) {
        throw ConfigurationError("courant number must lie in (0, 1], got " +
                                 std::to_string(courant));
    }
    if (!(div_tol > 0.0) || !(poisson_tol > 0.0) || poisson_max_iter <= 0) {
        throw ConfigurationError("solver tolerances and iteration cap must be positive");
    }
    if (!(dt_max > 0.0)) {
        throw ConfigurationError("dt_max must be positive");
    }
}

double limited_slope(double backward, double forward, Limiter limiter)
{
    if (limiter == Limiter::None) {
        return 0.5 * (backward + forward);
    }
    if (backward * forward <= 0.0) {
        return 0.0;
    }
    return backward > 0.0 ? std::min(backward, forward) : std::max(backward, forward);
}

namespace {

// Value at the face between q0 (upwind side, at offset 0) and the downwind
// neighbour, reconstructed from the upwind cell. `far` is the cell beyond the
// upwind one, `near` the downwind one. Missing neighbours give zero slope.
double reconstruct(double far, bool has_far, double up, double down, Limiter limiter)
{
    if (!has_far) {
        return up;
    }
    return up + 0.5 * limited_slope(up - far, down - up, limiter);
}

// Face value of a sequence q[0..n) at the face between q[j-1] and q[j],
// upwinded on the sign of `vel`.
template <typename Get>
double face_value(Get q, int j, int n, double vel, Limiter limiter)
{
    if (vel > 0.0) {
        return reconstruct(j >= 2 ? q(j - 2) : 0.0, j >= 2, q(j - 1), q(j), limiter);
    }
    if (vel < 0.0) {
        return reconstruct(j + 1 < n ? q(j + 1) : 0.0, j + 1 < n, q(j), q(j - 1), limiter);
    }
    return 0.5 * (q(j - 1) + q(j));
}

} // namespace

Flux compute_fluxes(const State& s, const Grid& g, Limiter limiter, MomentumAdvection momentum,
                    std::span<const double> background)
{
    if (!background.empty() && static_cast<int>(background.size()) != g.nz) {
        throw ConfigurationError("background density needs one value per cell row");
    }
    const bool well_balanced = !background.empty();
    const int nx = g.nx;
    const int nz = g.nz;
    Flux f{Field(g, Placement::XFace), Field(g, Placement::ZFace), Field(g, Placement::ZFace),
           Field(g, Placement::Cell),  Field(g, Placement::Node),  Field(g, Placement::Node),
           Field(g, Placement::Cell)};

    // Mass fluxes.
    for (int k = 0; k < nz; ++k) {
        auto row = [&](int i) { return s.rho(i, k); };
        for (int i = 1; i < nx; ++i) {
            const double vel = s.u(i, k);
            f.mass_x(i, k) = vel * face_value(row, i, nx, vel, limiter);
        }
    }
    for (int i = 0; i < nx; ++i) {
        auto col = [&](int k) { return s.rho(i, k); };
        auto dev = [&](int k) { return s.rho(i, k) - background[k]; };
        f.rho_hat_z(i, 0) = s.rho(i, 0);
        f.rho_hat_z(i, nz) = s.rho(i, nz - 1);
        for (int k = 1; k < nz; ++k) {
            const double vel = s.w(i, k);
            // With a background, the limiter acts on rho - rho_bar and the
            // background contributes its centred face value. A limited
            // reconstruction of the convex background itself is biased by
            // O(h^2 rho_bar'') with the sign of w, which gravity turns into
            // a spurious drag on small waves and a drift away from rest.
            const double rho_hat =
                well_balanced ? 0.5 * (background[k - 1] + background[k]) +
                                    face_value(dev, k, nz, vel, limiter)
                              : face_value(col, k, nz, vel, limiter);
            f.rho_hat_z(i, k) = rho_hat;
            f.mass_z(i, k) = vel * rho_hat;
        }
    }

    const bool centered = momentum == MomentumAdvection::Centered;

    // x-momentum through cell centres: mass flux is the mean of the two
    // x-faces bounding the cell.
    for (int k = 0; k < nz; ++k) {
        auto urow = [&](int i) { return s.u(i, k); };
        for (int i = 0; i < nx; ++i) {
            const double m = 0.5 * (f.mass_x(i, k) + f.mass_x(i + 1, k));
            const double uf = centered ? 0.5 * (s.u(i, k) + s.u(i + 1, k))
                                       : face_value(urow, i + 1, nx + 1, m, limiter);
            f.mom_x_east(i, k) = m * uf;
        }
    }
    // x-momentum through nodes (horizontal faces of the u control volume).
    for (int i = 1; i < nx; ++i) {
        auto ucol = [&](int k) { return s.u(i, k); };
        for (int k = 1; k < nz; ++k) {
            const double m = 0.5 * (f.mass_z(i - 1, k) + f.mass_z(i, k));
            const double uf = centered ? 0.5 * (s.u(i, k - 1) + s.u(i, k))
                                       : face_value(ucol, k, nz, m, limiter);
            f.mom_x_north(i, k) = m * uf;
        }
    }
    // z-momentum through nodes (vertical faces of the w control volume).
    for (int k = 1; k < nz; ++k) {
        auto wrow = [&](int i) { return s.w(i, k); };
        for (int i = 1; i < nx; ++i) {
            const double m = 0.5 * (f.mass_x(i, k - 1) + f.mass_x(i, k));
            const double wf = centered ? 0.5 * (s.w(i - 1, k) + s.w(i, k))
                                       : face_value(wrow, i, nx, m, limiter);
            f.mom_z_east(i, k) = m * wf;
        }
    }
    // z-momentum through cell centres.
    for (int i = 0; i < nx; ++i) {
        auto wcol = [&](int k) { return s.w(i, k); };
        for (int k = 0; k < nz; ++k) {
            const double m = 0.5 * (f.mass_z(i, k) + f.mass_z(i, k + 1));
            const double wf = centered ? 0.5 * (s.w(i, k) + s.w(i, k + 1))
                                       : face_value(wcol, k + 1, nz + 1, m, limiter);
            f.mom_z_north(i, k) = m * wf;
        }
    }
    return f;
}

double max_speed(const State& state)
{
    double m = 0.0;
    for (double v : state.u.values()) m = std::max(m, std::abs(v));
    for (double v : state.w.values()) m = std::max(m, std::abs(v));
    return m;
}

namespace {

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

double cfl_dt(const State& state, const Grid& grid, const SolverConfig& cfg,
              const StratificationProfile& profile)
{
    if (!all_finite(state.u.values()) || !all_finite(state.w.values())) {
        throw NumericBlowup("non-finite velocity in time-step selection", -1);
    }
    const double vmax = max_speed(state);
    double dt = std::min(cfg.courant * grid.h / (vmax + 1e-12), cfg.dt_max);
    const double n = buoyancy_frequency(profile);
    if (n > 0.0) {
        dt = std::min(dt, cfg.courant / n);
    }
    return dt;
}

Field hydrostatic_pressure(const Field& rho, const Grid& grid)
{
    Field p(grid, Placement::Cell);
    for (int i = 0; i < grid.nx; ++i) {
        p(i, grid.nz - 1) = 0.0;
        for (int k = grid.nz - 2; k >= 0; --k) {
            p(i, k) = p(i, k + 1) + kGravity * grid.h * 0.5 * (rho(i, k) + rho(i, k + 1));
        }
    }
    return p;
}

namespace {

void assemble_projection(FivePointSystem& sys, const Field& rfx, const Field& rfz, const Grid& g)
{
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            sys.coupling_x(i, k) = (i + 1 < g.nx) ? 1.0 / rfx(i + 1, k) : 0.0;
            sys.coupling_z(i, k) = (k + 1 < g.nz) ? 1.0 / rfz(i, k + 1) : 0.0;
        }
    }
    sys.factorize();
}

// Solves div(beta grad q) = div(u*) and subtracts beta grad q from the
// velocity. Returns q (= dt * pressure increment).
PoissonStats project_in_place(State& s, FivePointSystem& sys, Field& q, const Grid& g,
                              const SolverConfig& cfg)
{
    apply_wall_bc(s);
    const Field rfx = face_density_x(s.rho);
    const Field rfz = face_density_z(s.rho);
    assemble_projection(sys, rfx, rfz, g);

    const Field div = discrete_divergence(s, g);
    std::vector<double> b(div.size());
    const double h2 = g.cell_area();
    for (std::size_t c = 0; c < b.size(); ++c) {
        b[c] = -h2 * div.values()[c];
    }
    // ||r||_inf / h^2 is the divergence left behind, so only the absolute
    // criterion guarantees div_tol; a small relative residual can still
    // leave too much divergence when the input field is strongly divergent.
    const PoissonStats stats =
        sys.solve(b, q.values(), 0.0, 0.5 * cfg.div_tol * h2, cfg.poisson_max_iter);

    const double inv_h = 1.0 / g.h;
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 1; i < g.nx; ++i) {
            s.u(i, k) -= (q(i, k) - q(i - 1, k)) * inv_h / rfx(i, k);
        }
    }
    for (int k = 1; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            s.w(i, k) -= (q(i, k) - q(i, k - 1)) * inv_h / rfz(i, k);
        }
    }
    return stats;
}

} // namespace

State project(State state, double dt, const Grid& grid, const SolverConfig& cfg)
{
    FivePointSystem sys(grid.nx, grid.nz);
    Field q(grid, Placement::Cell);
    project_in_place(state, sys, q, grid, cfg);
    if (!state.p.matches(grid)) {
        state.p = Field(grid, Placement::Cell);
    }
    for (std::size_t c = 0; c < q.size(); ++c) {
        state.p.values()[c] += q.values()[c] / dt;
    }
    return state;
}

Integrator::Integrator(Grid grid, SolverConfig cfg, StratificationProfile profile)
    : grid_(grid), cfg_(cfg), profile_(profile), poisson_(grid.nx, grid.nz),
      q_guess_(grid, Placement::Cell)
{
    cfg_.validate();
    background_.resize(grid.nz);
    for (int k = 0; k < grid.nz; ++k) {
        background_[k] = rho0_unchecked(profile, grid.zc(k));
    }
}

State Integrator::project(State state, double dt)
{
    Field q(grid_, Placement::Cell);
    last_poisson_ = project_in_place(state, poisson_, q, grid_, cfg_);
    for (std::size_t c = 0; c < q.size(); ++c) {
        state.p.values()[c] += q.values()[c] / dt;
    }
    return state;
}

Integrator::Conserved Integrator::euler_update(const State& s, const Field& p_old, double dt) const
{
    const Grid& g = grid_;
    const Flux f = compute_fluxes(s, g, cfg_.limiter, cfg_.momentum, background_);
    const double r = dt / g.h;

    Conserved c{s.rho, Field(g, Placement::XFace), Field(g, Placement::ZFace)};
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            c.rho(i, k) -= r * ((f.mass_x(i + 1, k) - f.mass_x(i, k)) +
                                (f.mass_z(i, k + 1) - f.mass_z(i, k)));
        }
    }
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 1; i < g.nx; ++i) {
            const double rho_f = 0.5 * (s.rho(i - 1, k) + s.rho(i, k));
            const double div_flux = (f.mom_x_east(i, k) - f.mom_x_east(i - 1, k)) +
                                    (f.mom_x_north(i, k + 1) - f.mom_x_north(i, k));
            c.mx(i, k) = rho_f * s.u(i, k) - r * div_flux - r * (p_old(i, k) - p_old(i - 1, k));
        }
    }
    for (int k = 1; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const double rho_f = 0.5 * (s.rho(i, k - 1) + s.rho(i, k));
            const double div_flux = (f.mom_z_east(i + 1, k) - f.mom_z_east(i, k)) +
                                    (f.mom_z_north(i, k) - f.mom_z_north(i, k - 1));
            // Gravity uses the same face density as the mass flux, so the
            // work it does equals the potential-energy change of the
            // density update.
            c.mz(i, k) = rho_f * s.w(i, k) - r * div_flux - r * (p_old(i, k) - p_old(i, k - 1)) -
                         dt * kGravity * f.rho_hat_z(i, k);
        }
    }
    return c;
}

State Integrator::finish_stage(Conserved c, double dt, const Field& p_old, Field& q_out)
{
    State s(grid_);
    s.rho = std::move(c.rho);
    s.p = p_old;
    const Field rfx = face_density_x(s.rho);
    const Field rfz = face_density_z(s.rho);
    for (std::size_t n = 0; n < s.u.size(); ++n) {
        s.u.values()[n] = c.mx.values()[n] / rfx.values()[n];
    }
    for (std::size_t n = 0; n < s.w.size(); ++n) {
        s.w.values()[n] = c.mz.values()[n] / rfz.values()[n];
    }
    (void)dt;
    last_poisson_ = project_in_place(s, poisson_, q_out, grid_, cfg_);
    return s;
}

void Integrator::check_finite(const State& s) const
{
    const long step_index = steps_;
    if (!all_finite(s.rho.values()) || !all_finite(s.u.values()) || !all_finite(s.w.values())) {
        throw NumericBlowup("non-finite field values at step " + std::to_string(step_index),
                            step_index);
    }
    for (double r : s.rho.values()) {
        if (!(r > 0.0)) {
            throw NumericBlowup("non-positive density at step " + std::to_string(step_index),
                                step_index);
        }
    }
    if (reference_speed_ > 0.0) {
        const double v = max_speed(s);
        if (v > cfg_.blowup_factor * reference_speed_) {
            throw NumericBlowup("max speed " + std::to_string(v) + " exceeds " +
                                    std::to_string(cfg_.blowup_factor) +
                                    " x initial at step " + std::to_string(step_index),
                                step_index);
        }
    }
}

State Integrator::step(const State& s0, std::optional<double> dt_request)
{
    ++steps_;
    double dt = cfl_dt(s0, grid_, cfg_, profile_);
    if (dt_request) {
        dt = std::min(dt, *dt_request);
    }
    const Grid& g = grid_;
    const Field& p_old = s0.p;

    Conserved c0{s0.rho, Field(g, Placement::XFace), Field(g, Placement::ZFace)};
    {
        const Field rfx = face_density_x(s0.rho);
        const Field rfz = face_density_z(s0.rho);
        for (std::size_t n = 0; n < c0.mx.size(); ++n) {
            c0.mx.values()[n] = rfx.values()[n] * s0.u.values()[n];
        }
        for (std::size_t n = 0; n < c0.mz.size(); ++n) {
            c0.mz.values()[n] = rfz.values()[n] * s0.w.values()[n];
        }
    }
    auto blend = [](const Conserved& a, double wa, Conserved b, double wb) {
        auto mix = [&](const Field& x, Field& y) {
            for (std::size_t n = 0; n < y.size(); ++n) {
                y.values()[n] = wa * x.values()[n] + wb * y.values()[n];
            }
        };
        mix(a.rho, b.rho);
        mix(a.mx, b.mx);
        mix(a.mz, b.mz);
        return b;
    };

    Field q1(g, Placement::Cell);
    Field q2(g, Placement::Cell);
    Field& q3 = q_guess_;

    State s1 = finish_stage(euler_update(s0, p_old, dt), dt, p_old, q1);
    State s2 = finish_stage(blend(c0, 0.75, euler_update(s1, p_old, dt), 0.25), dt, p_old, q2);
    State s3 = finish_stage(blend(c0, 1.0 / 3.0, euler_update(s2, p_old, dt), 2.0 / 3.0), dt,
                            p_old, q3);

    for (std::size_t n = 0; n < s3.p.size(); ++n) {
        s3.p.values()[n] = p_old.values()[n] + (q1.values()[n] / 6.0 +
                                                 2.0 * q2.values()[n] / 3.0 + q3.values()[n]) / dt;
    }
    s3.t = s0.t + dt;
    check_finite(s3);
    return s3;
}

State step(const State& state, const Grid& grid, const SolverConfig& cfg,
           const StratificationProfile& profile)
{
    Integrator integrator(grid, cfg, profile);
    return integrator.step(state);
}

} // namespace stratflow
