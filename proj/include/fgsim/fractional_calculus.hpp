#pragma once

// Scalar special functions and quadrature oracles: the two-parameter
// Mittag-Leffler function E_{a,b}(z) for real z, the Riemann-Liouville
// fractional integral and the Caputo derivative of sampled functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include "fgsim/errors.hpp"

namespace fgsim {

/// Order and second parameter of E_{alpha,beta}. Valid for alpha in (0, 2], beta > 0.
struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const
    {
        if (!(alpha > 0.0 && alpha <= 2.0))
            throw ParameterError("Mittag-Leffler order alpha must lie in (0, 2], got " + std::to_string(alpha));
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw ParameterError("Mittag-Leffler parameter beta must be positive, got " + std::to_string(beta));
    }
};

/// A real function sampled on a strictly increasing grid that starts at zero.
struct SampledFunction {
    std::vector<double> grid;
    std::vector<double> values;

    void validate() const
    {
        if (grid.size() != values.size())
            throw ShapeError("sampled function: grid and values differ in length");
        if (grid.empty()) throw ShapeError("sampled function: empty grid");
        if (grid.front() != 0.0) throw ParameterError("sampled function: grid must start at 0");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1])) throw ParameterError("sampled function: grid must be strictly increasing");
    }

    template <class F>
    static SampledFunction sample(std::vector<double> grid, F&& f)
    {
        SampledFunction out;
        out.values.reserve(grid.size());
        for (double t : grid) out.values.push_back(f(t));
        out.grid = std::move(grid);
        return out;
    }
};

/// Uniform grid 0 = t_0 < ... < t_{points-1} = horizon.
inline std::vector<double> uniform_grid(double horizon, std::size_t points)
{
    detail::require(points >= 2 && horizon > 0.0, "uniform_grid: need horizon > 0 and at least 2 points");
    std::vector<double> g(points);
    const double h = horizon / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = h * static_cast<double>(i);
    g.back() = horizon;
    return g;
}

namespace detail {

constexpr double pi = std::numbers::pi;

/// 1/Gamma(x), zero at the poles of Gamma. Boost's Lanczos-based gamma is
/// accurate to a few ulp; reflection covers large negative arguments.
inline double reciprocal_gamma(double x)
{
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    if (x > 170.0) return std::exp(-boost::math::lgamma(x));
    if (x < -170.0) {
        const double s = boost::math::sin_pi(x);
        return s / pi * std::exp(boost::math::lgamma(1.0 - x));
    }
    return 1.0 / boost::math::tgamma(x);
}

/// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v)
    {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

inline double ml_series_direct(double alpha, double beta, double z)
{
    CompensatedSum acc;
    double zk = 1.0;
    int small_run = 0;
    for (int k = 0; k < 100000; ++k) {
        const double term = zk * reciprocal_gamma(alpha * k + beta);
        acc.add(term);
        const double arg = alpha * k + beta;
        if (k > 0 && arg > 2.0 && std::abs(term) <= 1e-17 * std::abs(acc.value())) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
        if (zk == 0.0) break;
        zk *= z;
    }
    return acc.value();
}

// Positive argument: every term is positive, so the sum is accumulated in
// log-space relative to the largest term.
inline double ml_series_positive(double alpha, double beta, double z)
{
    const double root = std::pow(z, 1.0 / alpha);
    const double log_estimate = root + (1.0 - beta) / alpha * std::log(z) - std::log(alpha);
    if (log_estimate > 709.0)
        throw RangeError("Mittag-Leffler value overflows double precision");
    // z^k overflows long before the terms decay when the root is large
    if (z <= 10.0 && root < 20.0) return ml_series_direct(alpha, beta, z);

    const double lz = std::log(z);
    std::vector<double> logs;
    double peak = -std::numeric_limits<double>::infinity();
    for (long k = 0; k < 10000000; ++k) {
        const double lt = k * lz - boost::math::lgamma(alpha * k + beta);
        logs.push_back(lt);
        peak = std::max(peak, lt);
        if (alpha * k > root + 10.0 && lt < peak - 45.0) break;
    }
    CompensatedSum acc;
    for (double lt : logs) acc.add(std::exp(lt - peak));
    const double out = std::exp(peak) * acc.value();
    if (!std::isfinite(out)) throw RangeError("Mittag-Leffler value overflows double precision");
    return out;
}

// Contributions of the poles s^alpha = -x of s^{alpha-beta}/(s^alpha + x) in
// the principal sheet. Present only for alpha > 1 (two conjugate poles).
inline double ml_pole_residues(double alpha, double beta, double x)
{
    if (alpha <= 1.0) return 0.0;
    const double rho = std::pow(x, 1.0 / alpha);
    const double theta = pi / alpha;
    const double c = boost::math::cos_pi(1.0 / alpha);
    const double s = boost::math::sin_pi(1.0 / alpha);
    return 2.0 / alpha * std::pow(x, (1.0 - beta) / alpha) * std::exp(rho * c)
         * std::cos(rho * s + (1.0 - beta) * theta);
}

// Large-|z| expansion for z = -x < 0:
//   E(z) = residues - sum_{k>=1} z^{-k} / Gamma(beta - alpha k).
// Returns nothing when the divergent series cannot reach the requested accuracy.
inline std::optional<double> ml_asymptotic_negative(double alpha, double beta, double x, double tol)
{
    const double residues = ml_pole_residues(alpha, beta, x);
    CompensatedSum alg;
    double last_mag = std::numeric_limits<double>::infinity();
    double xk = 1.0;
    bool converged = false;
    for (int k = 1; k <= 400; ++k) {
        xk /= x;
        const double arg = beta - alpha * k;
        // 1/Gamma vanishes at non-positive integers; rounding must not turn that into a tiny term
        if (arg <= 0.0 && std::abs(arg - std::round(arg)) < 1e-9) continue;
        const double rg = reciprocal_gamma(arg);
        if (rg == 0.0) continue;
        // -z^{-k} with z = -x  ->  -(-1)^k x^{-k}
        const double term = ((k % 2 == 0) ? -1.0 : 1.0) * xk * rg;
        const double mag = std::abs(term);
        if (!std::isfinite(mag) || mag > last_mag) break;
        const double scale = std::max(std::abs(alg.value() + term), std::abs(residues));
        if (mag <= tol * scale) {
            converged = true;
            break;
        }
        alg.add(term);
        last_mag = mag;
    }
    if (last_mag == std::numeric_limits<double>::infinity()) converged = true; // every term vanished
    if (!converged) return std::nullopt;
    if (alpha == 1.0) {
        // the pole sits on the branch cut; its weight e^{-x} x^{1-beta} must be negligible
        const double pole = std::exp(-x) * std::pow(x, 1.0 - beta);
        if (pole > tol * std::abs(alg.value())) return std::nullopt;
    }
    return residues + alg.value();
}

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule()
{
    static thread_local boost::math::quadrature::tanh_sinh<double> rule;
    return rule;
}

inline boost::math::quadrature::exp_sinh<double>& exp_sinh_rule()
{
    static thread_local boost::math::quadrature::exp_sinh<double> rule;
    return rule;
}

// Hankel contour collapsed onto the negative real axis of the Laplace
// transform s^{alpha-beta}/(s^alpha + x) of t^{beta-1}E_{alpha,beta}(-x t^alpha):
//   (1/pi) int_0^inf e^{-r} r^{alpha-beta} [r^alpha sin(pi beta) + x sin(pi(beta-alpha))]
//          / (r^{2 alpha} + 2 x r^alpha cos(pi alpha) + x^2) dr.
// Requires beta < 1 + alpha for integrability at the origin.
inline double ml_cut_integral(double alpha, double beta, double x)
{
    const double sb = boost::math::sin_pi(beta);
    const double sba = boost::math::sin_pi(beta - alpha);
    if (sb == 0.0 && sba == 0.0) return 0.0;
    const double ca = boost::math::cos_pi(alpha);
    auto kernel = [=](double r) {
        if (r <= 0.0) return 0.0;
        const double ra = std::pow(r, alpha);
        const double num = ra * sb + x * sba;
        const double den = ra * ra + 2.0 * x * ra * ca + x * x;
        return std::exp(-r) * std::pow(r, alpha - beta) * num / (pi * den);
    };
    // The denominator is smallest at r^alpha = -x cos(pi alpha) when that is positive.
    double split = std::pow(x, 1.0 / alpha);
    if (ca < 0.0) split = std::pow(-x * ca, 1.0 / alpha);
    split = std::min(split, 40.0);
    const double tol = 1e-13;
    const double head = tanh_sinh_rule().integrate(kernel, 0.0, split, tol);
    auto shifted = [&](double u) { return kernel(split + u); };
    const double tail = exp_sinh_rule().integrate(shifted, tol);
    return head + tail;
}

// alpha == 1: E_{1,beta}(z) = (1/Gamma(beta-1)) int_0^1 e^{z t}(1-t)^{beta-2} dt for beta > 1.
inline double ml_alpha_one_negative(double beta, double z);

inline double ml_negative(double alpha, double beta, double x)
{
    const double z = -x;
    if (std::pow(x, 1.0 / alpha) <= 2.0) return ml_series_direct(alpha, beta, z);
    if (auto a = ml_asymptotic_negative(alpha, beta, x, 1e-15)) return *a;
    if (alpha == 1.0) return ml_alpha_one_negative(beta, z);
    if (beta >= 1.0 + alpha) {
        // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z
        return (ml_negative(alpha, beta - alpha, x) - reciprocal_gamma(beta - alpha)) / z;
    }
    return ml_pole_residues(alpha, beta, x) + ml_cut_integral(alpha, beta, x);
}

inline double ml_alpha_one_negative(double beta, double z)
{
    if (beta == 1.0) return std::exp(z);
    if (beta < 1.0) return z * ml_alpha_one_negative(beta + 1.0, z) + reciprocal_gamma(beta);
    // u = 1 - t puts the endpoint singularity at the origin, where doubles resolve it
    auto integrand = [=](double u) { return std::exp(z * (1.0 - u)) * std::pow(u, beta - 2.0); };
    const double v = tanh_sinh_rule().integrate(integrand, 0.0, 1.0, 1e-14);
    return v * reciprocal_gamma(beta - 1.0);
}

} // namespace detail

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta)
/// for real z.
///
/// Small |z| uses the power series; large negative z uses the pole residues
/// plus the algebraic asymptotic series when it converges to working accuracy,
/// otherwise the residues plus the branch-cut integral. Positive z sums the
/// (cancellation-free) series and throws RangeError past the double range.
inline double ml(const MLParams& params, double z)
{
    params.validate();
    if (std::isnan(z)) throw DomainError("Mittag-Leffler argument is NaN");
    const double alpha = params.alpha;
    const double beta = params.beta;
    if (z == 0.0) return detail::reciprocal_gamma(beta);
    if (z > 0.0) return detail::ml_series_positive(alpha, beta, z);
    return detail::ml_negative(alpha, beta, -z);
}

inline double ml(double alpha, double beta, double z) { return ml(MLParams{alpha, beta}, z); }

namespace detail {

// Product-integration weights of (1/Gamma(mu)) (s - tau)^{mu-1} against the
// linear interpolant on [a, b], b <= s. Returns weights of f(a) and f(b).
inline std::pair<double, double> rl_cell_weights(double a, double b, double s, double mu, double inv_gamma_mu)
{
    const double ua = s - a; // lag at the left end, ua > ub >= 0
    const double ub = s - b;
    const double pa = std::pow(ua, mu);
    const double pb = ub > 0.0 ? std::pow(ub, mu) : 0.0;
    const double i0 = (pa - pb) / mu;                         // int u^{mu-1} du over [ub, ua]
    const double i1 = (pa * ua - pb * ub) / (mu + 1.0);       // int u^mu du over [ub, ua]
    const double h = b - a;
    // f(tau) = f(a) + (f(b) - f(a)) (tau - a)/h,  tau - a = ua - u
    const double wb = (ua * i0 - i1) / h;
    const double wa = i0 - wb;
    return {wa * inv_gamma_mu, wb * inv_gamma_mu};
}

} // namespace detail

/// Riemann-Liouville integral J^order f(s) by product integration: the weakly
/// singular kernel is integrated exactly against the piecewise-linear interpolant.
inline double rl_integral(const SampledFunction& f, double order, double s)
{
    f.validate();
    if (!(order > 0.0)) throw ParameterError("rl_integral: order must be positive");
    if (!(s >= f.grid.front() && s <= f.grid.back()))
        throw DomainError("rl_integral: evaluation point outside the sampled grid");
    if (s == 0.0) return 0.0;
    const double inv_gamma = detail::reciprocal_gamma(order);
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < f.grid.size(); ++i) {
        const double a = f.grid[i];
        if (a >= s) break;
        double b = f.grid[i + 1];
        double fb = f.values[i + 1];
        if (b > s) {
            fb = f.values[i] + (f.values[i + 1] - f.values[i]) * (s - a) / (b - a);
            b = s;
        }
        const auto [wa, wb] = detail::rl_cell_weights(a, b, s, order, inv_gamma);
        acc.add(wa * f.values[i]);
        acc.add(wb * fb);
    }
    return acc.value();
}

namespace detail {

// J^order of several sampled functions on one grid, at every node. The cell
// weights are shared so the extra columns are nearly free.
inline std::vector<std::vector<double>> rl_integral_columns(const std::vector<double>& grid,
                                                            const std::vector<std::vector<double>>& cols, double order)
{
    const std::size_t n = grid.size();
    const double inv_gamma = reciprocal_gamma(order);
    std::vector<std::vector<double>> out(cols.size(), std::vector<double>(n, 0.0));
    std::vector<CompensatedSum> acc(cols.size());
    for (std::size_t j = 1; j < n; ++j) {
        for (auto& a : acc) a = CompensatedSum{};
        for (std::size_t i = 0; i < j; ++i) {
            const auto [wa, wb] = rl_cell_weights(grid[i], grid[i + 1], grid[j], order, inv_gamma);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                acc[c].add(wa * cols[c][i]);
                acc[c].add(wb * cols[c][i + 1]);
            }
        }
        for (std::size_t c = 0; c < cols.size(); ++c) out[c][j] = acc[c].value();
    }
    return out;
}

} // namespace detail

/// J^order f evaluated at every grid node.
inline SampledFunction rl_integral_all(const SampledFunction& f, double order)
{
    f.validate();
    if (!(order > 0.0)) throw ParameterError("rl_integral_all: order must be positive");
    return {f.grid, detail::rl_integral_columns(f.grid, {f.values}, order)[0]};
}

namespace detail {

// Starting weights for product integration (Lubich): w[j][k] multiplies f(t_{k+1})
// at node j so that t^gamma is integrated exactly for each gamma in exps.
inline std::vector<std::vector<double>> rl_starting_weights(const std::vector<double>& t, double order,
                                                            const std::vector<double>& exps)
{
    const std::size_t q = exps.size(), n = t.size();
    std::vector<std::vector<double>> basis(q, std::vector<double>(n));
    for (std::size_t k = 0; k < q; ++k)
        for (std::size_t i = 0; i < n; ++i) basis[k][i] = std::pow(t[i] - t[0], exps[k]);
    const auto pi = rl_integral_columns(t, basis, order);
    // rows scaled by t_1^gamma so the q x q system stays O(1)
    std::vector<std::vector<double>> A(q, std::vector<double>(q));
    std::vector<double> scale(q);
    for (std::size_t k = 0; k < q; ++k) {
        scale[k] = std::pow(t[1] - t[0], exps[k]);
        for (std::size_t m = 0; m < q; ++m) A[k][m] = basis[k][m + 1] / scale[k];
    }
    std::vector<std::vector<double>> w(n, std::vector<double>(q, 0.0));
    for (std::size_t j = 1; j < n; ++j) {
        auto M = A;
        std::vector<double> r(q);
        for (std::size_t k = 0; k < q; ++k) {
            const double g = exps[k];
            const double exact = std::exp(std::lgamma(g + 1.0) - std::lgamma(g + 1.0 + order)) * std::pow(t[j] - t[0], g + order);
            r[k] = (exact - pi[k][j]) / scale[k];
        }
        // Gaussian elimination, partial pivoting
        for (std::size_t c = 0; c < q; ++c) {
            std::size_t piv = c;
            for (std::size_t k = c + 1; k < q; ++k)
                if (std::abs(M[k][c]) > std::abs(M[piv][c])) piv = k;
            std::swap(M[c], M[piv]);
            std::swap(r[c], r[piv]);
            for (std::size_t k = c + 1; k < q; ++k) {
                const double f = M[k][c] / M[c][c];
                for (std::size_t m = c; m < q; ++m) M[k][m] -= f * M[c][m];
                r[k] -= f * r[c];
            }
        }
        for (std::size_t c = q; c-- > 0;) {
            double v = r[c];
            for (std::size_t m = c + 1; m < q; ++m) v -= M[c][m] * w[j][m];
            w[j][c] = v / M[c][c];
        }
    }
    return w;
}

} // namespace detail

/// Caputo derivative of order in (1, 2] of a sampled function.
///
/// Test oracle, not a production path. Uses the identity
///   cD^order f = d^2/ds^2 J^{2-order} [f - f(0) - f'(0) s],
/// i.e. the fractional integral is taken by product integration first and the
/// two derivatives by second differences afterwards. Functions are assumed to
/// behave like a series in s^order near zero: starting weights make the
/// integral exact for s^order, and the value at s = 0 is extrapolated in the
/// variable s^order. The initial
/// slope f'(0) is estimated from a one-sided stencil unless supplied.
inline SampledFunction caputo_derivative(const SampledFunction& f, double order,
                                         std::optional<double> initial_slope = std::nullopt)
{
    f.validate();
    const std::size_t n = f.grid.size();
    if (n < 5) throw InsufficientDataError("caputo_derivative: need at least 5 samples");
    if (!(order > 1.0 && order <= 2.0)) throw ParameterError("caputo_derivative: order must lie in (1, 2]");

    const auto& t = f.grid;
    double slope = 0.0;
    if (initial_slope) {
        slope = *initial_slope;
    } else {
        // derivative at t0 of the quadratic through the first three samples
        const double h1 = t[1] - t[0], h2 = t[2] - t[0];
        slope = (-(h1 + h2) / (h1 * h2)) * f.values[0] + (h2 / (h1 * (h2 - h1))) * f.values[1]
              - (h1 / (h2 * (h2 - h1))) * f.values[2];
    }
    SampledFunction g{t, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) g.values[i] = f.values[i] - f.values[0] - slope * t[i];
    if (order < 2.0) {
        const double mu = 2.0 - order;
        // order + 1 and above are left to the O(h^2) base rule: correcting them
        // makes the starting system ill-conditioned
        const std::vector<double> exps{order};
        const auto raw = g.values;
        g = rl_integral_all(g, mu);
        const auto start = detail::rl_starting_weights(t, mu, exps);
        for (std::size_t j = 1; j < n; ++j) g.values[j] += start[j][0] * raw[1];
    }

    SampledFunction out{t, std::vector<double>(n)};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = t[i] - t[i - 1], hr = t[i + 1] - t[i];
        out.values[i] = 2.0 * ((g.values[i + 1] - g.values[i]) / hr - (g.values[i] - g.values[i - 1]) / hl) / (hl + hr);
    }
    // fit a + b s^order through nodes 1 and 2
    const double p1 = std::pow(t[1] - t[0], order), p2 = std::pow(t[2] - t[0], order);
    out.values[0] = (out.values[1] * p2 - out.values[2] * p1) / (p2 - p1);
    const double w = (t[n - 1] - t[n - 2]) / (t[n - 3] - t[n - 2]);
    out.values[n - 1] = out.values[n - 2] + w * (out.values[n - 3] - out.values[n - 2]);
    return out;
}

} // namespace fgsim
