#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fgsim/spectral_space.hpp"

#include "oracles/derived_values.inc"

namespace {

using namespace fgsim;

SpectralVector random_vector(std::size_t n, std::mt19937_64& gen)
{
    std::normal_distribution<double> d;
    SpectralVector v = SpectralVector::zeros(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = d(gen) / static_cast<double>((j + 1) * (j + 1));
    return v;
}

TEST(Spectrum, DirichletLaplacian)
{
    const auto sp = Spectrum::dirichlet_laplacian(4);
    ASSERT_EQ(sp.modes(), 4u);
    EXPECT_DOUBLE_EQ(sp.lambdas[0], std::numbers::pi * std::numbers::pi);
    EXPECT_DOUBLE_EQ(sp.lambdas[3], 16.0 * std::numbers::pi * std::numbers::pi);
    EXPECT_THROW(Spectrum::dirichlet_laplacian(0), ParameterError);
}

TEST(Spectrum, Validation)
{
    EXPECT_THROW(Spectrum{}.validate(), ParameterError);
    EXPECT_THROW((Spectrum{{0.0, 1.0}}).validate(), ParameterError);
    EXPECT_THROW((Spectrum{{2.0, 1.0}}).validate(), ParameterError);
    EXPECT_NO_THROW((Spectrum{{1.0, 1.0, 3.0}}).validate());
}

TEST(SpectralVector, Arithmetic)
{
    SpectralVector a({1.0, 2.0}), b({0.5, -1.0});
    EXPECT_EQ(a + b, SpectralVector({1.5, 1.0}));
    EXPECT_EQ(a - b, SpectralVector({0.5, 3.0}));
    EXPECT_EQ(2.0 * a, SpectralVector({2.0, 4.0}));
    EXPECT_EQ(SpectralVector::unit(3, 1), SpectralVector({0.0, 1.0, 0.0}));
    EXPECT_THROW(a + SpectralVector::zeros(3), ShapeError);
}

TEST(FracPower, HarmonicNorm)
{
    const auto sp = Spectrum::dirichlet_laplacian(16);
    SpectralVector v = SpectralVector::zeros(16);
    for (std::size_t j = 0; j < 16; ++j) v[j] = 1.0 / static_cast<double>(j + 1);
    EXPECT_NEAR(h_beta_norm_sq(sp, v, {0.5}), HBETA_16MODES_HARMONIC, 1e-10);
    // lambda^{1/2} gamma_j = pi for every mode
    EXPECT_NEAR(h_beta_norm_sq(sp, v, {0.5}), 16.0 * std::numbers::pi * std::numbers::pi, 1e-10);
}

TEST(FracPower, GroupPropertyAndIdentity)
{
    std::mt19937_64 gen(7);
    const auto sp = Spectrum::dirichlet_laplacian(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto v = random_vector(12, gen);
        EXPECT_EQ(apply_frac_power(sp, v, {0.0}), v);
        const auto lhs = apply_frac_power(sp, apply_frac_power(sp, v, {0.3}), {0.45});
        const auto rhs = apply_frac_power(sp, v, {0.75});
        for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(lhs[j], rhs[j], 1e-12 * std::abs(rhs[j]) + 1e-300);
        const auto back = apply_frac_power(sp, apply_frac_power(sp, v, {-0.6}), {0.6});
        for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(back[j], v[j], 1e-13 * std::abs(v[j]) + 1e-300);
    }
}

TEST(FracPower, NormMonotoneInExponent)
{
    std::mt19937_64 gen(3);
    const auto sp = Spectrum::dirichlet_laplacian(10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto v = random_vector(10, gen);
        double prev = h_beta_norm_sq(sp, v, {0.0});
        for (double b : {0.1, 0.25, 0.5, 0.75, 1.0}) {
            const double cur = h_beta_norm_sq(sp, v, {b});
            EXPECT_GE(cur, prev);
            prev = cur;
        }
    }
}

TEST(FracPower, Validation)
{
    const auto sp = Spectrum::dirichlet_laplacian(3);
    EXPECT_THROW(apply_frac_power(sp, SpectralVector::zeros(3), {1.5}), ParameterError);
    EXPECT_THROW(apply_frac_power(sp, SpectralVector::zeros(4), {0.5}), ShapeError);
    EXPECT_THROW(h_beta_norm_sq(sp, SpectralVector::zeros(3), {-0.5}), ParameterError);
}

TEST(Projection, IdempotentAndGapBound)
{
    std::mt19937_64 gen(11);
    const auto sp = Spectrum::dirichlet_laplacian(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto v = random_vector(8, gen);
        EXPECT_EQ(project(project(v, 5), 5), project(v, 5));
        EXPECT_EQ(project(v, 8), v);
        for (std::size_t j = 5; j < 8; ++j) EXPECT_EQ(project(v, 5)[j], 0.0);
        // ||A^{b-e}(P^n - P^m)v||^2 <= lambda_m^{-2(e-b)} ||v||^2
        const double gap = projection_gap_norm(sp, v, 8, 3, {0.25}, {0.75});
        EXPECT_LE(gap, std::pow(sp.lambdas[3], -1.0) * h_beta_norm_sq(sp, v, {0.0}) * (1.0 + 1e-14));
    }
    EXPECT_THROW(project(SpectralVector::zeros(3), 4), ParameterError);
}

TEST(Projection, GapOracle)
{
    const auto sp = Spectrum::dirichlet_laplacian(8);
    SpectralVector v(std::vector<double>(8, 0.25));
    const double gap = projection_gap_norm(sp, v, 8, 2, {0.25}, {0.75});
    EXPECT_NEAR(gap, GAP_8MODES_M2, 1e-15);
    EXPECT_LE(gap, GAP_8MODES_M2_BOUND);
    EXPECT_THROW(projection_gap_norm(sp, v, 2, 4, {0.25}, {0.75}), ParameterError);
    EXPECT_THROW(projection_gap_norm(sp, v, 8, 2, {0.75}, {0.25}), ParameterError);
}

TEST(FracPower, OperatorNorm)
{
    const auto sp = Spectrum::dirichlet_laplacian(5);
    EXPECT_DOUBLE_EQ(frac_power_norm(sp, -0.5), 1.0 / std::numbers::pi);
    EXPECT_DOUBLE_EQ(frac_power_norm(sp, 0.5), 5.0 * std::numbers::pi);
}

} // namespace
