#pragma once

// Fractional cosine, sine and Riemann-Liouville families of -A acting
// diagonally on the eigenbasis:
//   C_a(s) psi_j = E_{a,1}(-lambda_j s^a) psi_j
//   S_a(s) psi_j = s E_{a,2}(-lambda_j s^a) psi_j
//   P_a(s) psi_j = s^{a-1} E_{a,a}(-lambda_j s^a) psi_j

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/fractional_calculus.hpp"
#include "fgsim/spectral_space.hpp"

namespace fgsim {

struct FamilyParams {
    double alpha = 2.0;
    Spectrum spectrum;

    void validate() const
    {
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw ParameterError("family order alpha must lie in (1, 2], got " + std::to_string(alpha));
        spectrum.validate();
    }
};

/// Scalar kernels on the eigenline of eigenvalue lambda.
namespace kernels {

inline double cosine(double alpha, double lambda, double s)
{
    if (s == 0.0) return 1.0;
    return ml(alpha, 1.0, -lambda * std::pow(s, alpha));
}

inline double sine(double alpha, double lambda, double s)
{
    if (s == 0.0) return 0.0;
    return s * ml(alpha, 2.0, -lambda * std::pow(s, alpha));
}

inline double rl(double alpha, double lambda, double s)
{
    if (s == 0.0) return alpha == 1.0 ? 1.0 : 0.0;
    return std::pow(s, alpha - 1.0) * ml(alpha, alpha, -lambda * std::pow(s, alpha));
}

/// int_0^t rl(u) du = t^a E_{a,a+1}(-lambda t^a).
inline double rl_moment0(double alpha, double lambda, double t)
{
    if (t == 0.0) return 0.0;
    const double ta = std::pow(t, alpha);
    return ta * ml(alpha, alpha + 1.0, -lambda * ta);
}

/// int_0^t u rl(u) du = t * rl_moment0(t) - t^{a+1} E_{a,a+2}(-lambda t^a).
inline double rl_moment1(double alpha, double lambda, double t)
{
    if (t == 0.0) return 0.0;
    const double ta = std::pow(t, alpha);
    return t * ta * (ml(alpha, alpha + 1.0, -lambda * ta) - ml(alpha, alpha + 2.0, -lambda * ta));
}

} // namespace kernels

namespace detail {

template <class Kernel>
SpectralVector apply_diagonal(const FamilyParams& fp, double s, const SpectralVector& v, Kernel&& kernel)
{
    fp.validate();
    check_dims(fp.spectrum, v);
    if (!(s >= 0.0)) throw DomainError("operator family evaluated at negative time " + std::to_string(s));
    SpectralVector out = v;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (out[j] != 0.0) out[j] *= kernel(fp.alpha, fp.spectrum.lambdas[j], s);
    return out;
}

} // namespace detail

inline SpectralVector cosine_apply(const FamilyParams& fp, double s, const SpectralVector& v)
{
    return detail::apply_diagonal(fp, s, v, kernels::cosine);
}

inline SpectralVector sine_apply(const FamilyParams& fp, double s, const SpectralVector& v)
{
    return detail::apply_diagonal(fp, s, v, kernels::sine);
}

/// P_a(0) is the continuous extension, the zero operator for a > 1.
inline SpectralVector rl_apply(const FamilyParams& fp, double s, const SpectralVector& v)
{
    return detail::apply_diagonal(fp, s, v, kernels::rl);
}

/// Grid estimates of M = sup ||C_a(s)|| and rho = sup ||A P_a(s)|| over [0, horizon].
/// These are maxima over the sampled times, not certified suprema.
struct BoundEstimate {
    double M = 0.0;
    double rho = 0.0;
    double M_at = 0.0;   // time of the maximum
    double rho_at = 0.0;
    std::vector<double> grid;
};

/// Sample times: grid_points uniform points on [0, horizon] merged with
/// grid_points geometric points on [1e-6 horizon, horizon]. The geometric
/// part resolves the peak of lambda s^{a-1} E_{a,a}(-lambda s^a), which sits
/// near s ~ lambda^{-1/a} and is missed by a coarse uniform grid for large lambda.
inline BoundEstimate estimate_bounds(const FamilyParams& fp, double horizon, std::size_t grid_points)
{
    fp.validate();
    if (!(horizon > 0.0)) throw ParameterError("estimate_bounds: horizon must be positive");
    if (grid_points < 16) throw ParameterError("estimate_bounds: need at least 16 grid points");

    BoundEstimate out;
    auto& g = out.grid;
    g.reserve(2 * grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
        g.push_back(horizon * static_cast<double>(i) / static_cast<double>(grid_points - 1));
    const double lo = std::log(1e-6 * horizon), hi = std::log(horizon);
    for (std::size_t i = 0; i < grid_points; ++i)
        g.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1)));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());

    const double a = fp.alpha;
    for (double lambda : fp.spectrum.lambdas) {
        for (double s : g) {
            const double c = std::abs(kernels::cosine(a, lambda, s));
            if (c > out.M) {
                out.M = c;
                out.M_at = s;
            }
            const double r = lambda * std::abs(kernels::rl(a, lambda, s));
            if (r > out.rho) {
                out.rho = r;
                out.rho_at = s;
            }
        }
    }
    return out;
}

} // namespace fgsim
