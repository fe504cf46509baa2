#include "stratflow/poisson.hpp"

#include "stratflow/errors.hpp"
#include "stratflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace stratflow {

namespace {

constexpr double kMicTau = 0.97;
constexpr double kMicSigma = 0.25;

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace

FivePointSystem::FivePointSystem(int ni, int nk)
    : ni_(ni), nk_(nk)
{
    const auto n = static_cast<std::size_t>(ni) * static_cast<std::size_t>(nk);
    cx_.assign(n, 0.0);
    cz_.assign(n, 0.0);
    dd_.assign(n, 0.0);
    diag_.assign(n, 0.0);
    precon_.assign(n, 0.0);
    r_.assign(n, 0.0);
    z_.assign(n, 0.0);
    s_.assign(n, 0.0);
    as_.assign(n, 0.0);
    tmp_.assign(n, 0.0);
}

void FivePointSystem::factorize()
{
    singular_ = std::all_of(dd_.begin(), dd_.end(), [](double d) { return d == 0.0; });
    for (int k = 0; k < nk_; ++k) {
        for (int i = 0; i < ni_; ++i) {
            double d = dd_[idx(i, k)];
            if (i + 1 < ni_) d += cx_[idx(i, k)];
            if (i > 0) d += cx_[idx(i - 1, k)];
            if (k + 1 < nk_) d += cz_[idx(i, k)];
            if (k > 0) d += cz_[idx(i, k - 1)];
            diag_[idx(i, k)] = d;
        }
    }
    // Off-diagonal entries of A are -c; the recurrences below are written in
    // terms of those negative entries.
    for (int k = 0; k < nk_; ++k) {
        for (int i = 0; i < ni_; ++i) {
            const std::size_t c = idx(i, k);
            double e = diag_[c];
            if (i > 0) {
                const std::size_t l = idx(i - 1, k);
                const double ax = -cx_[l] * precon_[l];
                const double az = (k + 1 < nk_) ? -cz_[l] : 0.0;
                e -= ax * ax + kMicTau * (-cx_[l]) * az * precon_[l] * precon_[l];
            }
            if (k > 0) {
                const std::size_t b = idx(i, k - 1);
                const double az = -cz_[b] * precon_[b];
                const double ax = (i + 1 < ni_) ? -cx_[b] : 0.0;
                e -= az * az + kMicTau * (-cz_[b]) * ax * precon_[b] * precon_[b];
            }
            if (e < kMicSigma * diag_[c]) {
                e = diag_[c];
            }
            precon_[c] = e > 0.0 ? 1.0 / std::sqrt(e) : 0.0;
        }
    }
}

void FivePointSystem::apply(std::span<const double> q, std::span<double> out) const
{
    for (int k = 0; k < nk_; ++k) {
        for (int i = 0; i < ni_; ++i) {
            const std::size_t c = idx(i, k);
            double v = diag_[c] * q[c];
            if (i + 1 < ni_) v -= cx_[c] * q[c + 1];
            if (i > 0) v -= cx_[c - 1] * q[c - 1];
            if (k + 1 < nk_) v -= cz_[c] * q[c + static_cast<std::size_t>(ni_)];
            if (k > 0) v -= cz_[c - static_cast<std::size_t>(ni_)] *
                            q[c - static_cast<std::size_t>(ni_)];
            out[c] = v;
        }
    }
}

void FivePointSystem::precondition(std::span<const double> r, std::span<double> z)
{
    // Forward substitution L y = r.
    std::vector<double>& y = tmp_;
    for (int k = 0; k < nk_; ++k) {
        for (int i = 0; i < ni_; ++i) {
            const std::size_t c = idx(i, k);
            double t = r[c];
            if (i > 0) {
                const std::size_t l = c - 1;
                t += cx_[l] * precon_[l] * y[l];
            }
            if (k > 0) {
                const std::size_t b = c - static_cast<std::size_t>(ni_);
                t += cz_[b] * precon_[b] * y[b];
            }
            y[c] = t * precon_[c];
        }
    }
    // Backward substitution L^T z = y.
    for (int k = nk_ - 1; k >= 0; --k) {
        for (int i = ni_ - 1; i >= 0; --i) {
            const std::size_t c = idx(i, k);
            double t = y[c];
            if (i + 1 < ni_) t += cx_[c] * precon_[c] * z[c + 1];
            if (k + 1 < nk_) t += cz_[c] * precon_[c] * z[c + static_cast<std::size_t>(ni_)];
            z[c] = t * precon_[c];
        }
    }
}

void FivePointSystem::remove_mean(std::span<double> v) const
{
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) {
        x -= mean;
    }
}

PoissonStats FivePointSystem::solve(std::span<const double> b_in, std::span<double> q,
                                    double rel_tol, double abs_tol, int max_iter)
{
    const std::size_t n = r_.size();
    std::vector<double> b(b_in.begin(), b_in.end());
    if (singular_) {
        double sum = 0.0;
        double abs_sum = 0.0;
        for (double v : b) {
            sum += v;
            abs_sum += std::abs(v);
        }
        if (std::abs(sum) > kCompatibilityTolerance * abs_sum + 1e-300) {
            throw CompatibilityError("Neumann problem is not solvable: rhs mean = " +
                                     std::to_string(sum / static_cast<double>(n)) +
                                     " (relative " + std::to_string(sum / abs_sum) + ")");
        }
        remove_mean(b);
        remove_mean(q);
    }

    PoissonStats stats;
    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) {
        std::fill(q.begin(), q.end(), 0.0);
        return stats;
    }

    apply(q, as_);
    for (std::size_t c = 0; c < n; ++c) {
        r_[c] = b[c] - as_[c];
    }
    if (singular_) remove_mean(r_);

    auto converged = [&](double r_norm) {
        stats.relative_residual = r_norm / b_norm;
        stats.max_residual = max_abs(r_);
        return stats.relative_residual <= rel_tol || stats.max_residual <= abs_tol;
    };
    if (converged(std::sqrt(dot(r_, r_)))) {
        return stats;
    }

    precondition(r_, z_);
    if (singular_) remove_mean(z_);
    s_ = z_;
    double rho = dot(z_, r_);
    for (int it = 1; it <= max_iter; ++it) {
        apply(s_, as_);
        const double alpha = rho / dot(s_, as_);
        for (std::size_t c = 0; c < n; ++c) {
            q[c] += alpha * s_[c];
            r_[c] -= alpha * as_[c];
        }
        stats.iterations = it;
        if (converged(std::sqrt(dot(r_, r_)))) {
            if (singular_) remove_mean(q);
            return stats;
        }
        precondition(r_, z_);
        if (singular_) remove_mean(z_);
        const double rho_new = dot(z_, r_);
        const double beta = rho_new / rho;
        rho = rho_new;
        for (std::size_t c = 0; c < n; ++c) {
            s_[c] = z_[c] + beta * s_[c];
        }
    }
    throw ConvergenceError("Poisson solve did not converge in " + std::to_string(max_iter) +
                           " iterations (relative residual " +
                           std::to_string(stats.relative_residual) + ")");
}

Field solve_variable_poisson(const Field& beta, const Field& rhs, const Grid& grid,
                             const SolverConfig& cfg, PoissonStats* stats)
{
    FivePointSystem sys(grid.nx, grid.nz);
    auto harmonic = [](double a, double b) { return 2.0 * a * b / (a + b); };
    for (int k = 0; k < grid.nz; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            if (i + 1 < grid.nx) sys.coupling_x(i, k) = harmonic(beta(i, k), beta(i + 1, k));
            if (k + 1 < grid.nz) sys.coupling_z(i, k) = harmonic(beta(i, k), beta(i, k + 1));
        }
    }
    sys.factorize();

    // A phi = -h^2 rhs, with A the positive operator.
    std::vector<double> b(rhs.size());
    const double h2 = grid.cell_area();
    for (std::size_t c = 0; c < b.size(); ++c) {
        b[c] = -h2 * rhs.values()[c];
    }
    Field phi(grid, Placement::Cell);
    const PoissonStats s = sys.solve(b, phi.values(), cfg.poisson_tol, 0.0, cfg.poisson_max_iter);
    if (stats) *stats = s;
    return phi;
}

} // namespace stratflow
