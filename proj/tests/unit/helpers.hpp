#pragma once

#include "stratflow/grid.hpp"
#include "stratflow/solver.hpp"
#include "stratflow/stratification.hpp"

#include <random>

namespace testing {

inline stratflow::Grid desk_grid() { return stratflow::make_grid(1.0, 0.25, 0.005); }

inline stratflow::Grid small_grid() { return stratflow::make_grid(0.4, 0.2, 0.02); }

/// Background state at rest with hydrostatic pressure.
inline stratflow::State rest_state(const stratflow::Grid& g, const stratflow::StratificationProfile& p)
{
    stratflow::State s(g);
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            s.rho(i, k) = stratflow::rho0_unchecked(p, g.zc(k));
        }
    }
    s.p = stratflow::hydrostatic_pressure(s.rho, g);
    return s;
}

/// Random positive density near 1000 and random face velocities, walls closed.
inline stratflow::State random_state(const stratflow::Grid& g, unsigned seed, double vel = 0.1)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dr(990.0, 1010.0);
    std::uniform_real_distribution<double> dv(-vel, vel);
    stratflow::State s(g);
    for (double& r : s.rho.values()) r = dr(rng);
    for (double& v : s.u.values()) v = dv(rng);
    for (double& v : s.w.values()) v = dv(rng);
    stratflow::apply_wall_bc(s);
    return s;
}

/// Smooth density and a smooth divergence-free velocity from a nodal
/// streamfunction.
inline stratflow::State smooth_state(const stratflow::Grid& g, double amp = 0.05)
{
    stratflow::State s(g);
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            s.rho(i, k) = 1000.0 - 20.0 * g.zc(k) + 2.0 * std::sin(6.0 * g.xc(i)) * std::cos(9.0 * g.zc(k));
        }
    }
    auto psi = [&](int i, int k) {
        const double x = g.xf(i) / g.width;
        const double z = g.zf(k) / g.height;
        return amp * g.height * std::sin(M_PI * x) * std::sin(M_PI * z) * (1.0 + 0.3 * x * z);
    };
    for (int k = 0; k < g.nz; ++k)
        for (int i = 0; i <= g.nx; ++i) s.u(i, k) = (psi(i, k + 1) - psi(i, k)) / g.h;
    for (int k = 0; k <= g.nz; ++k)
        for (int i = 0; i < g.nx; ++i) s.w(i, k) = -(psi(i + 1, k) - psi(i, k)) / g.h;
    s.p = stratflow::hydrostatic_pressure(s.rho, g);
    return s;
}

} // namespace testing
