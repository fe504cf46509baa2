#pragma once

#include "stratflow/grid.hpp"

#include <vector>

namespace stratflow {

struct SolverConfig;

/// Outcome of an iterative solve.
struct PoissonStats {
    int iterations = 0;
    double relative_residual = 0.0;  ///< ||r||_2 / ||b||_2
    double max_residual = 0.0;       ///< ||r||_inf, same units as the rhs
};

/// Symmetric five-point operator on an ni x nk lattice
///
///   (A q)_c = sum_nb c_f (q_c - q_nb) + d_c q_c
///
/// where c_f >= 0 are face couplings and d_c >= 0 an extra diagonal term
/// (used for Dirichlet neighbours). Solved by conjugate gradients with a
/// modified incomplete Cholesky (MIC(0)) preconditioner. When every d_c is
/// zero the operator is the pure-Neumann one: its null space is the
/// constants, the rhs must have zero mean and the solution is returned with
/// zero mean.
class FivePointSystem {
public:
    FivePointSystem(int ni, int nk);

    /// Coupling between (i, k) and (i + 1, k).
    double& coupling_x(int i, int k) { return cx_[idx(i, k)]; }
    /// Coupling between (i, k) and (i, k + 1).
    double& coupling_z(int i, int k) { return cz_[idx(i, k)]; }
    double& extra_diagonal(int i, int k) { return dd_[idx(i, k)]; }

    /// Must be called after the couplings change and before solve().
    void factorize();

    /// Solves A q = b. `q` holds the initial guess on entry. Iteration stops
    /// when ||r||_2 <= rel_tol ||b||_2 or ||r||_inf <= abs_tol. Throws
    /// ConvergenceError after max_iter iterations and CompatibilityError for
    /// a singular system whose rhs has non-zero mean.
    PoissonStats solve(std::span<const double> b, std::span<double> q, double rel_tol,
                       double abs_tol, int max_iter);

    void apply(std::span<const double> q, std::span<double> out) const;

    int ni() const { return ni_; }
    int nk() const { return nk_; }
    bool singular() const { return singular_; }

private:
    std::size_t idx(int i, int k) const
    {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(ni_) +
               static_cast<std::size_t>(i);
    }
    void precondition(std::span<const double> r, std::span<double> z);
    void remove_mean(std::span<double> v) const;

    int ni_;
    int nk_;
    bool singular_ = true;
    std::vector<double> cx_;
    std::vector<double> cz_;
    std::vector<double> dd_;
    std::vector<double> diag_;
    std::vector<double> precon_;
    std::vector<double> r_, z_, s_, as_, tmp_;
};

/// Relative tolerance on |sum(rhs)| / sum(|rhs|) for Neumann solvability.
inline constexpr double kCompatibilityTolerance = 1e-9;

/// Solves div(beta grad phi) = rhs on the cell-centred grid with homogeneous
/// Neumann walls. `beta` is cell-centred; face coefficients are the harmonic
/// mean of the two neighbours (1 / mean(rho) when beta = 1 / rho). The
/// returned phi has zero mean.
Field solve_variable_poisson(const Field& beta, const Field& rhs, const Grid& grid,
                             const SolverConfig& cfg, PoissonStats* stats = nullptr);

} // namespace stratflow
