#pragma once

// Q-Wiener paths W(s) = sum_j sqrt(q_j) beta_j(s) e_j sampled on a time grid,
// left-point Ito sums against them, and an empirical check of the maximal
// inequality E sup_s ||int_0^s zeta dW||^2 <= 4 Tr(Q) int_0^T E||zeta||^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/parallel.hpp"
#include "fgsim/spectral_space.hpp"

namespace fgsim {

/// Covariance eigenvalues q_j of Q against the noise basis e_j.
/// The name q_eigs avoids a clash with the eigenvalues lambda_j of A.
struct CovarianceSpec {
    std::vector<double> q_eigs;

    std::size_t modes() const { return q_eigs.size(); }
    double trace() const
    {
        double t = 0.0;
        for (double q : q_eigs) t += q;
        return t;
    }
    void validate() const
    {
        for (double q : q_eigs)
            if (!(q >= 0.0) || !std::isfinite(q)) throw ParameterError("covariance eigenvalues must be finite and >= 0");
    }
};

/// One sampled path: increments(i, j) = W_j(t_{i+1}) - W_j(t_i), row-major.
struct WienerPath {
    std::vector<double> grid;
    std::vector<double> increments;
    std::size_t modes = 0;
    std::uint64_t seed = 0;

    std::size_t steps() const { return grid.empty() ? 0 : grid.size() - 1; }
    double increment(std::size_t step, std::size_t mode) const { return increments[step * modes + mode]; }

    /// W_mode(grid[node]) by cumulative summation from W(0) = 0.
    double value(std::size_t node, std::size_t mode) const
    {
        double w = 0.0;
        for (std::size_t i = 0; i < node; ++i) w += increment(i, mode);
        return w;
    }
};

/// Stream seed for sample `index` of an ensemble with master seed `master`.
/// Each sample owns an independent generator, so results do not depend on
/// which thread ran which sample.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace detail {

inline void check_time_grid(const std::vector<double>& grid)
{
    if (grid.size() < 2) throw ParameterError("time grid needs at least two nodes");
    if (grid.front() != 0.0) throw ParameterError("time grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ParameterError("time grid must be strictly increasing");
}

} // namespace detail

/// Increments are drawn step by step, mode by mode, from one mt19937_64
/// seeded with `seed`.
inline WienerPath sample_wiener(const CovarianceSpec& cov, const std::vector<double>& grid, std::uint64_t seed)
{
    cov.validate();
    detail::check_time_grid(grid);
    WienerPath path;
    path.grid = grid;
    path.modes = cov.modes();
    path.seed = seed;
    path.increments.resize((grid.size() - 1) * cov.modes());
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double dt = grid[i + 1] - grid[i];
        for (std::size_t j = 0; j < cov.modes(); ++j)
            path.increments[i * cov.modes() + j] = std::sqrt(cov.q_eigs[j] * dt) * normal(gen);
    }
    return path;
}

/// Diagonal integrand: table[i][j] is the coefficient mapping noise mode j
/// into spectral direction j on step i, evaluated at the left end t_i.
using IntegrandTable = std::vector<std::vector<double>>;

/// Left-point Ito sum sum_i zeta(t_i) dW_i, written into `out_modes` spectral
/// coefficients (noise modes beyond that are dropped, missing ones are zero).
inline SpectralVector ito_integral(const WienerPath& path, const IntegrandTable& integrand, std::size_t out_modes)
{
    if (integrand.size() != path.steps())
        throw ShapeError("ito_integral: integrand has " + std::to_string(integrand.size()) + " steps, path has " +
                         std::to_string(path.steps()));
    SpectralVector out = SpectralVector::zeros(out_modes);
    const std::size_t m = std::min(out_modes, path.modes);
    for (std::size_t i = 0; i < path.steps(); ++i) {
        if (integrand[i].size() != path.modes) throw ShapeError("ito_integral: integrand row length != noise modes");
        for (std::size_t j = 0; j < m; ++j) out[j] += integrand[i][j] * path.increment(i, j);
    }
    return out;
}

inline SpectralVector ito_integral(const WienerPath& path, const IntegrandTable& integrand)
{
    return ito_integral(path, integrand, path.modes);
}

struct Lemma21Result {
    double lhs = 0.0;        // sample mean of sup_s ||int_0^s zeta dW||^2
    double lhs_stderr = 0.0;
    double rhs = 0.0;        // 4 Tr(Q) int_0^T E||zeta||^2 ds
    std::size_t samples = 0;
};

/// The integrand factory receives the sampled path and returns a
/// non-anticipating table (row i may only depend on increments before i).
/// ||zeta||^2 on the right-hand side is the operator norm max_j zeta_j^2 of the
/// diagonal integrand: with the Hilbert-Schmidt weighting sum_j q_j zeta_j^2 the
/// extra factor Tr(Q) would make the bound false whenever Tr(Q) < 1.
inline Lemma21Result lemma21_check(const CovarianceSpec& cov, const std::vector<double>& grid,
                                   const std::function<IntegrandTable(const WienerPath&)>& make_integrand,
                                   std::size_t samples, std::uint64_t master_seed, std::size_t threads = 0)
{
    if (samples < 2) throw ParameterError("lemma21_check: need at least two samples");
    detail::check_time_grid(grid);
    std::vector<double> sup_sq(samples), energy(samples);
    parallel_for(
        samples,
        [&](std::size_t s) {
            const WienerPath path = sample_wiener(cov, grid, derive_seed(master_seed, s));
            const IntegrandTable zeta = make_integrand(path);
            if (zeta.size() != path.steps()) throw ShapeError("lemma21_check: integrand/grid mismatch");
            std::vector<double> acc(path.modes, 0.0);
            double best = 0.0, quad = 0.0;
            for (std::size_t i = 0; i < path.steps(); ++i) {
                double op = 0.0;
                for (std::size_t j = 0; j < path.modes; ++j) {
                    acc[j] += zeta[i][j] * path.increment(i, j);
                    op = std::max(op, zeta[i][j] * zeta[i][j]);
                }
                quad += op * (grid[i + 1] - grid[i]);
                double nrm = 0.0;
                for (double a : acc) nrm += a * a;
                best = std::max(best, nrm);
            }
            sup_sq[s] = best;
            energy[s] = quad;
        },
        threads);

    Lemma21Result r;
    r.samples = samples;
    double mean = 0.0, mean_e = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        mean += sup_sq[s];
        mean_e += energy[s];
    }
    mean /= static_cast<double>(samples);
    mean_e /= static_cast<double>(samples);
    double var = 0.0;
    for (double x : sup_sq) var += (x - mean) * (x - mean);
    var /= static_cast<double>(samples - 1);
    r.lhs = mean;
    r.lhs_stderr = std::sqrt(var / static_cast<double>(samples));
    r.rhs = 4.0 * cov.trace() * mean_e;
    return r;
}

} // namespace fgsim
