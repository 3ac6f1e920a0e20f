#pragma once

// Elements of the state space as coefficient sequences against the
// orthonormal eigenbasis of A, fractional powers A^p and the spectral
// projections P^n.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fgsim/errors.hpp"

namespace fgsim {

/// Eigenvalues of the positive self-adjoint operator A, ascending.
/// Mode j has eigenvalue lambdas[j] and eigenfunction psi_j.
struct Spectrum {
    std::vector<double> lambdas;

    std::size_t modes() const { return lambdas.size(); }

    void validate() const
    {
        if (lambdas.empty()) throw ParameterError("spectrum: at least one mode is required");
        if (!(lambdas.front() > 0.0)) throw ParameterError("spectrum: eigenvalues must be positive");
        for (std::size_t j = 1; j < lambdas.size(); ++j)
            if (!(lambdas[j] >= lambdas[j - 1]))
                throw ParameterError("spectrum: eigenvalues must be ascending");
    }

    /// -d^2/dxi^2 on (0,1) with Dirichlet conditions: lambda_j = (j+1)^2 pi^2,
    /// psi_j = sqrt(2) sin((j+1) pi xi).
    static Spectrum dirichlet_laplacian(std::size_t modes)
    {
        detail::require(modes >= 1, "spectrum: at least one mode is required");
        Spectrum sp;
        sp.lambdas.resize(modes);
        for (std::size_t j = 0; j < modes; ++j) {
            const double w = static_cast<double>(j + 1) * std::numbers::pi;
            sp.lambdas[j] = w * w;
        }
        return sp;
    }
};

/// Coefficients gamma_j against psi_j. Modes beyond the active Galerkin
/// dimension are stored as zeros.
struct SpectralVector {
    std::vector<double> coeffs;

    SpectralVector() = default;
    explicit SpectralVector(std::vector<double> c) : coeffs(std::move(c)) {}

    static SpectralVector zeros(std::size_t modes) { return SpectralVector(std::vector<double>(modes, 0.0)); }
    static SpectralVector unit(std::size_t modes, std::size_t j)
    {
        SpectralVector v = zeros(modes);
        v.coeffs.at(j) = 1.0;
        return v;
    }

    std::size_t size() const { return coeffs.size(); }
    double operator[](std::size_t j) const { return coeffs[j]; }
    double& operator[](std::size_t j) { return coeffs[j]; }

    SpectralVector& operator+=(const SpectralVector& o)
    {
        check_same(o);
        for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] += o.coeffs[j];
        return *this;
    }
    SpectralVector& operator-=(const SpectralVector& o)
    {
        check_same(o);
        for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] -= o.coeffs[j];
        return *this;
    }
    SpectralVector& operator*=(double c)
    {
        for (double& x : coeffs) x *= c;
        return *this;
    }
    friend SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
    friend SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
    friend SpectralVector operator*(double c, SpectralVector a) { return a *= c; }
    friend bool operator==(const SpectralVector&, const SpectralVector&) = default;

private:
    void check_same(const SpectralVector& o) const
    {
        if (o.coeffs.size() != coeffs.size())
            throw ShapeError("spectral vectors differ in length: " + std::to_string(coeffs.size()) + " vs " +
                             std::to_string(o.coeffs.size()));
    }
};

/// Exponent p of A^p, restricted to [-1, 1].
struct FracPower {
    double exponent = 0.0;

    void validate() const
    {
        if (!(exponent >= -1.0 && exponent <= 1.0))
            throw ParameterError("fractional power exponent must lie in [-1, 1], got " + std::to_string(exponent));
    }
};

namespace detail {

inline void check_dims(const Spectrum& sp, const SpectralVector& v)
{
    if (v.size() != sp.modes())
        throw ShapeError("spectral vector has " + std::to_string(v.size()) + " coefficients, spectrum has " +
                         std::to_string(sp.modes()) + " modes");
}

} // namespace detail

inline SpectralVector apply_frac_power(const Spectrum& sp, const SpectralVector& v, FracPower p)
{
    p.validate();
    detail::check_dims(sp, v);
    SpectralVector out = v;
    if (p.exponent == 0.0) return out;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= std::pow(sp.lambdas[j], p.exponent);
    return out;
}

/// ||A^beta v||^2 = sum_j lambda_j^{2 beta} gamma_j^2.
inline double h_beta_norm_sq(const Spectrum& sp, const SpectralVector& v, FracPower beta)
{
    beta.validate();
    if (beta.exponent < 0.0) throw ParameterError("h_beta_norm_sq: exponent must be nonnegative");
    detail::check_dims(sp, v);
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double w = beta.exponent == 0.0 ? v[j] : std::pow(sp.lambdas[j], beta.exponent) * v[j];
        acc += w * w;
    }
    return acc;
}

/// P^n keeps the first n coefficients (modes 0..n-1) and zeroes the rest.
inline SpectralVector project(const SpectralVector& v, std::size_t n)
{
    if (n > v.size())
        throw ParameterError("project: n = " + std::to_string(n) + " exceeds " + std::to_string(v.size()) + " modes");
    SpectralVector out = v;
    for (std::size_t j = n; j < out.size(); ++j) out[j] = 0.0;
    return out;
}

/// ||A^{beta-eta} (P^n - P^m) v||^2 = sum_{j=m}^{n-1} lambda_j^{2(beta-eta)} gamma_j^2.
inline double projection_gap_norm(const Spectrum& sp, const SpectralVector& v, std::size_t n, std::size_t m,
                                  FracPower beta, FracPower eta)
{
    detail::check_dims(sp, v);
    if (m > n) throw ParameterError("projection_gap_norm: requires m <= n");
    if (n > v.size()) throw ParameterError("projection_gap_norm: n exceeds the number of modes");
    if (!(beta.exponent >= 0.0 && beta.exponent < eta.exponent && eta.exponent <= 1.0))
        throw ParameterError("projection_gap_norm: requires 0 <= beta < eta <= 1");
    double acc = 0.0;
    for (std::size_t j = m; j < n; ++j) acc += std::pow(sp.lambdas[j], 2.0 * (beta.exponent - eta.exponent)) * v[j] * v[j];
    return acc;
}

/// Operator norm ||A^e|| restricted to the retained modes: lambda_0^e for
/// e <= 0, lambda_max^e otherwise.
inline double frac_power_norm(const Spectrum& sp, double exponent)
{
    sp.validate();
    return exponent <= 0.0 ? std::pow(sp.lambdas.front(), exponent) : std::pow(sp.lambdas.back(), exponent);
}

} // namespace fgsim
