#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fgsim/fractional_calculus.hpp"

#include "oracles/derived_values.inc"

namespace {

using namespace fgsim;

struct MLRow {
    double alpha, beta, z, value;
};

const std::vector<MLRow> kReference = {
#include "oracles/ml_reference.inc"
};

TEST(MittagLeffler, MatchesReferenceTable)
{
    ASSERT_GT(kReference.size(), 900u);
    double worst = 0.0;
    for (const auto& r : kReference) {
        const double got = ml(r.alpha, r.beta, r.z);
        const double err = std::abs(got - r.value) / std::max(std::abs(r.value), 1e-300);
        worst = std::max(worst, err);
        EXPECT_LE(err, 1e-10) << "alpha=" << r.alpha << " beta=" << r.beta << " z=" << r.z;
    }
    RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(MittagLeffler, ElementaryCases)
{
    EXPECT_NEAR(ml(1.0, 1.0, 1.0), std::numbers::e, 1e-14);
    EXPECT_NEAR(ml(2.0, 1.0, -4.0), std::cos(2.0), 1e-14);
    EXPECT_NEAR(ml(0.5, 1.5, 0.0), 1.0 / std::tgamma(1.5), 1e-15);
    EXPECT_NEAR(ml(1.5, 1.0, -2.0), ML_15_1_AT_M2, 1e-13);
    EXPECT_NEAR(ml(2.0, 2.0, -9.0), std::sin(3.0) / 3.0, 1e-14);
}

TEST(MittagLeffler, ExponentialAndCosineIdentities)
{
    for (int i = 0; i <= 200; ++i) {
        const double z = -50.0 + 55.0 * i / 200.0;
        EXPECT_NEAR(ml(1.0, 1.0, z), std::exp(z), 1e-10 * std::max(1.0, std::exp(z)));
        const double x = 50.0 * i / 200.0;
        EXPECT_NEAR(ml(2.0, 1.0, -x * x), std::cos(x), 1e-9);
    }
}

TEST(MittagLeffler, RecurrenceInBeta)
{
    for (double a : {1.2, 1.5, 1.8})
        for (double b : {0.7, 1.0, 2.0})
            for (double z : {-90.0, -20.0, -3.0, -0.5, 0.0, 0.4}) {
                const double lhs = ml(a, b, z);
                const double rhs = z * ml(a, a + b, z) + 1.0 / std::tgamma(b);
                EXPECT_NEAR(lhs, rhs, 1e-9) << a << ' ' << b << ' ' << z;
            }
}

TEST(MittagLeffler, NonnegativeOnNegativeAxisForAlphaAtMostOne)
{
    // complete monotonicity of E_{a,1}(-x) for 0 < a <= 1
    for (double a : {0.3, 0.6, 0.9, 1.0}) {
        double prev = 1.0;
        for (double x = 0.0; x <= 40.0; x += 0.5) {
            const double v = ml(a, 1.0, -x);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, prev + 1e-14);
            prev = v;
        }
    }
}

TEST(MittagLeffler, RejectsBadParameters)
{
    EXPECT_THROW(ml(0.0, 1.0, 1.0), ParameterError);
    EXPECT_THROW(ml(2.5, 1.0, 1.0), ParameterError);
    EXPECT_THROW(ml(1.5, -1.0, 1.0), ParameterError);
    EXPECT_THROW(ml(1.5, 1.0, std::nan("")), DomainError);
}

TEST(MittagLeffler, OverflowIsReported)
{
    EXPECT_THROW(ml(1.0, 1.0, 800.0), RangeError);
    EXPECT_THROW(ml(0.5, 1.0, 40.0), RangeError);
}

TEST(RLIntegral, PolynomialsAreExact)
{
    const auto g = uniform_grid(2.0, 41);
    const auto one = SampledFunction::sample(g, [](double) { return 1.0; });
    EXPECT_NEAR(rl_integral(one, 1.0, 2.0), 2.0, 1e-14);
    const auto t = SampledFunction::sample(g, [](double s) { return s; });
    // J^{1/2} t = Gamma(2)/Gamma(5/2) t^{3/2}
    EXPECT_NEAR(rl_integral(t, 0.5, 1.0), 1.0 / std::tgamma(2.5), 1e-13);
    EXPECT_NEAR(rl_integral(t, 0.5, 1.3), std::pow(1.3, 1.5) / std::tgamma(2.5), 1e-13);
    EXPECT_EQ(rl_integral(t, 0.5, 0.0), 0.0);
}

TEST(RLIntegral, HalfIntegralOfMittagLeffler)
{
    const auto f = SampledFunction::sample(uniform_grid(1.0, 2049), [](double s) {
        return ml(1.5, 1.0, -std::pow(s, 1.5));
    });
    EXPECT_NEAR(rl_integral(f, 0.5, 1.0), RL_HALF_ML15_AT_1, 1e-6);
}

TEST(RLIntegral, SemigroupProperty)
{
    const auto g = uniform_grid(1.0, 2049);
    // vanishes to second order so J^a f stays smooth enough for linear interpolation
    const auto f = SampledFunction::sample(g, [](double s) { return s * s * std::cos(3.0 * s) + s * s * s; });
    for (double a : {0.3, 0.7})
        for (double b : {0.4, 0.9}) {
            const auto ja = rl_integral_all(f, a);
            const double lhs = rl_integral(ja, b, 1.0);
            const double rhs = rl_integral(f, a + b, 1.0);
            EXPECT_NEAR(lhs, rhs, 1e-6) << a << ' ' << b;
        }
}

TEST(RLIntegral, RejectsPointsOffTheGrid)
{
    const auto f = SampledFunction::sample(uniform_grid(1.0, 11), [](double s) { return s; });
    EXPECT_THROW(rl_integral(f, 0.5, 1.5), DomainError);
    EXPECT_THROW(rl_integral(f, 0.5, -0.1), DomainError);
    EXPECT_THROW(rl_integral(f, 0.0, 0.5), ParameterError);
    SampledFunction bad{{0.0, 0.5, 0.4}, {1.0, 1.0, 1.0}};
    EXPECT_THROW(rl_integral(bad, 0.5, 0.45), ParameterError);
    SampledFunction ragged{{0.0, 0.5}, {1.0}};
    EXPECT_THROW(rl_integral(ragged, 0.5, 0.4), ShapeError);
}

TEST(Caputo, QuadraticAndConstant)
{
    const auto g = uniform_grid(1.0, 4097);
    const auto sq = caputo_derivative(SampledFunction::sample(g, [](double s) { return s * s; }), 2.0);
    for (std::size_t i = 0; i < g.size(); i += 256) EXPECT_NEAR(sq.values[i], 2.0, 1e-6);
    const auto c = caputo_derivative(SampledFunction::sample(g, [](double) { return 3.0; }), 1.5);
    for (double v : c.values) EXPECT_NEAR(v, 0.0, 1e-12);
    // cD^a t^2 = 2 t^{2-a} / Gamma(3-a)
    const auto p = caputo_derivative(SampledFunction::sample(g, [](double s) { return s * s; }), 1.5, 0.0);
    for (std::size_t i = 512; i < g.size(); i += 512)
        EXPECT_NEAR(p.values[i], 2.0 * std::pow(g[i], 0.5) / std::tgamma(1.5), 1e-4);
}

TEST(Caputo, MittagLefflerEigenfunction)
{
    const auto g = uniform_grid(1.0, 4097);
    for (double a : {1.5, 1.9})
        for (double lambda : {1.0, std::numbers::pi * std::numbers::pi}) {
            const auto y = SampledFunction::sample(g, [&](double s) { return ml(a, 1.0, -lambda * std::pow(s, a)); });
            const auto d = caputo_derivative(y, a, 0.0);
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(d.values[i] + lambda * y.values[i]));
            EXPECT_LE(worst, 1e-4) << "alpha=" << a << " lambda=" << lambda;
        }
}

TEST(Caputo, InputValidation)
{
    EXPECT_THROW(caputo_derivative(SampledFunction::sample(uniform_grid(1.0, 4), [](double s) { return s; }), 1.5),
                 InsufficientDataError);
    EXPECT_THROW(caputo_derivative(SampledFunction::sample(uniform_grid(1.0, 8), [](double s) { return s; }), 0.5),
                 ParameterError);
}

} // namespace
