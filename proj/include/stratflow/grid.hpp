#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stratflow {

/// Where the samples of a field live on the staggered (MAC) mesh.
enum class Placement {
    Cell,   ///< cell centres, nx x nz
    XFace,  ///< vertical faces carrying u, (nx+1) x nz
    ZFace,  ///< horizontal faces carrying w, nx x (nz+1)
    Node,   ///< cell corners, (nx+1) x (nz+1)
};

/// Uniform square mesh over [0, width] x [0, height]; z points up.
struct Grid {
    double width = 0.0;
    double height = 0.0;
    double h = 0.0;
    int nx = 0;
    int nz = 0;

    double cell_area() const { return h * h; }
    double xc(int i) const { return (i + 0.5) * h; }
    double zc(int k) const { return (k + 0.5) * h; }
    double xf(int i) const { return i * h; }
    double zf(int k) const { return k * h; }

    int extent_x(Placement p) const;
    int extent_z(Placement p) const;
};

/// Builds a grid with nx = width/h, nz = height/h.
/// Throws ConfigurationError when the ratios are not integral to 1e-9
/// and ResolutionError when fewer than four cells fit in either direction.
Grid make_grid(double width, double height, double h);

/// Dense 2D array of doubles tagged with its placement. Element (i, k) is
/// stored at k * ni + i, so x is the fast index.
class Field {
public:
    Field() = default;
    Field(const Grid& grid, Placement placement, double value = 0.0);
    Field(int ni, int nk, Placement placement, double value = 0.0);

    double& operator()(int i, int k) { return data_[index(i, k)]; }
    double operator()(int i, int k) const { return data_[index(i, k)]; }

    int ni() const { return ni_; }
    int nk() const { return nk_; }
    Placement placement() const { return placement_; }
    std::size_t size() const { return data_.size(); }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    void fill(double value);
    bool matches(const Grid& grid) const;

    bool operator==(const Field&) const = default;

private:
    std::size_t index(int i, int k) const {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(ni_) +
               static_cast<std::size_t>(i);
    }

    int ni_ = 0;
    int nk_ = 0;
    Placement placement_ = Placement::Cell;
    std::vector<double> data_;
};

/// Density, face velocities and pressure at one time level.
struct State {
    double t = 0.0;
    Field rho;  ///< cell centres, kg/m^3
    Field u;    ///< x-faces, m/s
    Field w;    ///< z-faces, m/s
    Field p;    ///< cell centres, Pa (up to a constant)

    State() = default;
    explicit State(const Grid& grid);

    bool operator==(const State&) const = default;
};

/// Zeroes the boundary-normal velocity on all four walls. Tangential and
/// interior values are left untouched, so the operation is idempotent.
void apply_wall_bc(State& state);
State apply_wall_bc(State state, const Grid& grid);

/// Cell-centred divergence (u_e - u_w + w_t - w_b) / h.
Field discrete_divergence(const State& state, const Grid& grid);

/// max |div| over all cells.
double max_abs_divergence(const State& state, const Grid& grid);

/// Face density used by the momentum control volumes: arithmetic mean of
/// the two neighbouring cells. Wall faces copy their single neighbour.
Field face_density_x(const Field& rho);
Field face_density_z(const Field& rho);

/// Velocities averaged from faces to cell centres.
double u_at_cell(const State& state, int i, int k);
double w_at_cell(const State& state, int i, int k);

/// Vorticity du/dz - dw/dx at nodes. Boundary nodes are set to zero (they
/// carry no information under the free-slip condition).
Field vorticity_nodes(const State& state, const Grid& grid);

} // namespace stratflow
