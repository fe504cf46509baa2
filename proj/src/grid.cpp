#include "stratflow/grid.hpp"

#include "stratflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stratflow {

int Grid::extent_x(Placement p) const
{
    return (p == Placement::XFace || p == Placement::Node) ? nx + 1 : nx;
}

int Grid::extent_z(Placement p) const
{
    return (p == Placement::ZFace || p == Placement::Node) ? nz + 1 : nz;
}

namespace {

int integral_ratio(double length, double h, const char* name)
{
    const double ratio = length / h;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-9 * ratio) {
        throw ConfigurationError(std::string(name) + " = " + std::to_string(length) +
                                 " is not an integer multiple of h = " + std::to_string(h));
    }
    return static_cast<int>(n);
}

} // namespace

Grid make_grid(double width, double height, double h)
{
    if (!(width > 0.0) || !(height > 0.0) || !(h > 0.0)) {
        throw ConfigurationError("grid dimensions and spacing must be positive");
    }
    if (h > std::min(width, height) / 4.0 * (1.0 + 1e-12)) {
        throw ResolutionError("grid spacing h = " + std::to_string(h) +
                              " leaves fewer than 4 cells across the domain");
    }
    Grid g;
    g.width = width;
    g.height = height;
    g.h = h;
    g.nx = integral_ratio(width, h, "width");
    g.nz = integral_ratio(height, h, "height");
    if (g.nx < 4 || g.nz < 4) {
        throw ResolutionError("grid needs at least 4 cells in each direction");
    }
    return g;
}

Field::Field(const Grid& grid, Placement placement, double value)
    : Field(grid.extent_x(placement), grid.extent_z(placement), placement, value)
{
}

Field::Field(int ni, int nk, Placement placement, double value)
    : ni_(ni), nk_(nk), placement_(placement),
      data_(static_cast<std::size_t>(ni) * static_cast<std::size_t>(nk), value)
{
}

void Field::fill(double value)
{
    std::fill(data_.begin(), data_.end(), value);
}

bool Field::matches(const Grid& grid) const
{
    return ni_ == grid.extent_x(placement_) && nk_ == grid.extent_z(placement_);
}

State::State(const Grid& grid)
    : rho(grid, Placement::Cell), u(grid, Placement::XFace), w(grid, Placement::ZFace),
      p(grid, Placement::Cell)
{
}

void apply_wall_bc(State& state)
{
    const int nux = state.u.ni();
    for (int k = 0; k < state.u.nk(); ++k) {
        state.u(0, k) = 0.0;
        state.u(nux - 1, k) = 0.0;
    }
    const int nwz = state.w.nk();
    for (int i = 0; i < state.w.ni(); ++i) {
        state.w(i, 0) = 0.0;
        state.w(i, nwz - 1) = 0.0;
    }
}

State apply_wall_bc(State state, const Grid& grid)
{
    (void)grid;
    apply_wall_bc(state);
    return state;
}

Field discrete_divergence(const State& state, const Grid& grid)
{
    Field div(grid, Placement::Cell);
    const double inv_h = 1.0 / grid.h;
    for (int k = 0; k < grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            div(i, k) = ((state.u(i + 1, k) - state.u(i, k)) +
                         (state.w(i, k + 1) - state.w(i, k))) * inv_h;
        }
    }
    return div;
}

double max_abs_divergence(const State& state, const Grid& grid)
{
    const Field div = discrete_divergence(state, grid);
    double m = 0.0;
    for (double d : div.values()) {
        m = std::max(m, std::abs(d));
    }
    return m;
}

Field face_density_x(const Field& rho)
{
    const int nx = rho.ni();
    const int nz = rho.nk();
    Field out(nx + 1, nz, Placement::XFace);
    for (int k = 0; k < nz; ++k) {
        out(0, k) = rho(0, k);
        for (int i = 1; i < nx; ++i) {
            out(i, k) = 0.5 * (rho(i - 1, k) + rho(i, k));
        }
        out(nx, k) = rho(nx - 1, k);
    }
    return out;
}

Field face_density_z(const Field& rho)
{
    const int nx = rho.ni();
    const int nz = rho.nk();
    Field out(nx, nz + 1, Placement::ZFace);
    for (int i = 0; i < nx; ++i) {
        out(i, 0) = rho(i, 0);
        out(i, nz) = rho(i, nz - 1);
    }
    for (int k = 1; k < nz; ++k) {
        for (int i = 0; i < nx; ++i) {
            out(i, k) = 0.5 * (rho(i, k - 1) + rho(i, k));
        }
    }
    return out;
}

double u_at_cell(const State& state, int i, int k)
{
    return 0.5 * (state.u(i, k) + state.u(i + 1, k));
}

double w_at_cell(const State& state, int i, int k)
{
    return 0.5 * (state.w(i, k) + state.w(i, k + 1));
}

Field vorticity_nodes(const State& state, const Grid& grid)
{
    Field xi(grid, Placement::Node);
    const double inv_h = 1.0 / grid.h;
    for (int k = 1; k < grid.nz; ++k) {
        for (int i = 1; i < grid.nx; ++i) {
            xi(i, k) = (state.u(i, k) - state.u(i, k - 1)) * inv_h -
                       (state.w(i, k) - state.w(i - 1, k)) * inv_h;
        }
    }
    return xi;
}

} // namespace stratflow
