#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fgsim/problem.hpp"

#include "oracles/derived_values.inc"

namespace {

using namespace fgsim;
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

struct GoldenLedger {
    double M, rho, T;
    std::vector<double> s_next;
    double nb, ne, y0b, z0b, y0e, z0e, trQ, a2p, lnq, lnpq, LK, LKp;
    std::vector<double> Dh1, Dh2, Ch1, Ch2, N, Q, Mk;
    double D, R, Mprime;
};

const std::vector<GoldenLedger> kGolden = {
#include "oracles/ledger_golden.inc"
};

LedgerInputs inputs_of(const GoldenLedger& g)
{
    LedgerInputs in;
    in.M = g.M;
    in.rho = g.rho;
    in.horizon = g.T;
    in.s_next = g.s_next;
    in.norm_A_beta_m1 = g.nb;
    in.norm_A_eta_m1 = g.ne;
    in.y0_beta_sq = g.y0b;
    in.z0_beta_sq = g.z0b;
    in.y0_eta_sq = g.y0e;
    in.z0_eta_sq = g.z0e;
    in.trace_Q = g.trQ;
    in.a2_Lp = g.a2p;
    in.LN_Lq = g.lnq;
    in.LN_prime_Lq = g.lnpq;
    in.L_K = g.LK;
    in.L_K_prime = g.LKp;
    in.D_h1 = g.Dh1;
    in.D_h2 = g.Dh2;
    in.C_h1 = g.Ch1;
    in.C_h2 = g.Ch2;
    return in;
}

void expect_rel(double got, double want, double tol = 1e-12)
{
    EXPECT_NEAR(got, want, tol * std::max(1.0, std::abs(want)));
}

TEST(Schedule, Validation)
{
    EXPECT_NO_THROW((ImpulseSchedule{{0.2, 0.5}, {0.3, 0.6}, 1.0}).validate());
    EXPECT_NO_THROW((ImpulseSchedule{{}, {}, 1.0}).validate());
    EXPECT_THROW((ImpulseSchedule{{0.2}, {0.2}, 1.0}).validate(), ParameterError);
    EXPECT_THROW((ImpulseSchedule{{0.2, 0.25}, {0.3, 0.6}, 1.0}).validate(), ParameterError);
    EXPECT_THROW((ImpulseSchedule{{0.2}, {1.0}, 1.0}).validate(), ParameterError);
    EXPECT_THROW((ImpulseSchedule{{0.0}, {0.5}, 1.0}).validate(), ParameterError);
    EXPECT_THROW((ImpulseSchedule{{0.2}, {}, 1.0}).validate(), ParameterError);
    const ImpulseSchedule s{{0.2, 0.5}, {0.3, 0.6}, 1.0};
    EXPECT_EQ(s.evolution_start(0), 0.0);
    EXPECT_EQ(s.evolution_start(2), 0.6);
    EXPECT_EQ(s.evolution_end(0), 0.2);
    EXPECT_EQ(s.evolution_end(2), 1.0);
}

TEST(Problem, Validation)
{
    auto spec = build_heat_example(HeatExampleOptions{});
    EXPECT_NO_THROW(spec.validate());
    auto bad = spec;
    bad.alpha = 1.0;
    EXPECT_THROW(bad.validate(), ParameterError);
    bad = spec;
    bad.beta = 0.8;
    EXPECT_THROW(bad.validate(), ParameterError);
    bad = spec;
    bad.y0 = SpectralVector::zeros(3);
    EXPECT_THROW(bad.validate(), ShapeError);
    bad = spec;
    bad.cov.q_eigs.push_back(1.0);
    EXPECT_THROW(bad.validate(), ShapeError);
    bad = spec;
    bad.y0[0] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(Ledger, GoldenValues)
{
    ASSERT_EQ(kGolden.size(), 3u);
    for (const auto& g : kGolden) {
        const auto L = assemble_constants(inputs_of(g));
        ASSERT_EQ(L.N.size(), g.N.size());
        for (std::size_t k = 0; k < g.N.size(); ++k) {
            expect_rel(L.N[k], g.N[k]);
            expect_rel(L.Q[k], g.Q[k]);
            expect_rel(L.Mk[k], g.Mk[k]);
        }
        expect_rel(L.D, g.D);
        expect_rel(L.R, g.R);
        expect_rel(L.M_prime, g.Mprime);
    }
}

TEST(Ledger, ZeroNonlinearity)
{
    LedgerInputs in;
    in.M = 1.3;
    in.rho = 7.0;
    in.horizon = 0.8;
    in.s_next = {0.8};
    in.y0_beta_sq = 2.0;
    in.z0_beta_sq = 0.5;
    const auto L = assemble_constants(in);
    EXPECT_EQ(L.Q[0], 0.0);
    EXPECT_EQ(L.D, 0.0);
    expect_rel(L.N[0], 4.0 * (1.69 * 2.0 + 1.69 * 0.64 * 0.5));
    EXPECT_TRUE(feasibility_check(L).feasible());
}

TEST(Ledger, MismatchedImpulseConstants)
{
    LedgerInputs in;
    in.s_next = {0.3, 1.0};
    EXPECT_THROW(assemble_constants(in), ParameterError);
    in.s_next.clear();
    EXPECT_THROW(assemble_constants(in), ParameterError);
}

TEST(Ledger, FeasibilityFlags)
{
    LedgerInputs in = inputs_of(kGolden[1]);
    const auto L = assemble_constants(in);
    const auto f = feasibility_check(L);
    EXPECT_FALSE(f.contraction);
    EXPECT_FALSE(f.feasible());
    const auto ok = feasibility_check(assemble_constants(inputs_of(kGolden[0])));
    EXPECT_TRUE(ok.contraction);
    EXPECT_TRUE(ok.feasible());
    // inflating L_K breaks the contraction
    in = inputs_of(kGolden[0]);
    in.L_K = 10.0;
    EXPECT_FALSE(feasibility_check(assemble_constants(in)).contraction);
}

TEST(Ledger, HolderNormClosedForm)
{
    // ||e^{-2s}/9||_{L^2(0,T)} = sqrt((1 - e^{-4T}) / 4) / 9
    const double T = 0.7;
    const double got = detail::lr_norm([](double s) { return std::exp(-2.0 * s) / 9.0; }, 2.0, T, 256);
    EXPECT_NEAR(got, std::sqrt((1.0 - std::exp(-4.0 * T)) / 4.0) / 9.0, 1e-10);
    EXPECT_EQ(detail::lr_norm({}, 2.0, T, 16), 0.0);
}

TEST(HeatExample, DeclaredConstants)
{
    HeatExampleOptions o;
    o.modes = 16;
    o.beta = 0.5;
    o.schedule = ImpulseSchedule{{0.3, 0.6}, {0.4, 0.7}, 1.0};
    const auto spec = build_heat_example(o);
    const auto& c = spec.nonlin.constants;
    EXPECT_DOUBLE_EQ(c.L_K, 1.0 / (100.0 * kPi2));
    EXPECT_DOUBLE_EQ(c.L_K_prime, 1.0 / (100.0 * kPi2));
    EXPECT_DOUBLE_EQ(c.L_N(0.0), 1.0 / (9.0 * kPi2));
    EXPECT_DOUBLE_EQ(c.L_N(0.5), std::exp(-1.0) / (9.0 * kPi2));
    EXPECT_DOUBLE_EQ(c.L_N_prime(0.25), std::exp(-0.5) / 9.0);
    ASSERT_EQ(c.D_h1.size(), 2u);
    EXPECT_DOUBLE_EQ(c.D_h1[0], 1.0 / 9.0);
    EXPECT_DOUBLE_EQ(c.D_h1[1], 1.0 / 25.0);
    EXPECT_DOUBLE_EQ(c.D_h2[0], 1.0 / 9.0);
    EXPECT_DOUBLE_EQ(c.D_h2[1], 4.0 / 25.0);
    EXPECT_EQ(c.C_h1, c.D_h1);
    EXPECT_EQ(c.C_h2, c.D_h2);
    EXPECT_DOUBLE_EQ(spec.spectrum.lambdas[0], kPi2);
}

TEST(HeatExample, PointwiseMaps)
{
    EXPECT_EQ(heat::K_factor(0.0), 0.0);
    for (double v : {-5.0, -0.3, 0.0, 0.7, 100.0}) {
        EXPECT_DOUBLE_EQ(heat::noise_field(0.0, v), std::abs(v) / (3.0 * (1.0 + std::abs(v))));
        EXPECT_LE(heat::noise_field(0.0, v), 1.0 / 3.0);
        EXPECT_LE(std::abs(heat::h1_field(1, 0.2, v)), 1.0 / 3.0);
        EXPECT_LE(std::abs(heat::h2_field(2, 0.2, v)), 2.0 / 5.0);
    }
    // Lipschitz in v with the declared constants
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double x = u(gen), y = u(gen), s = std::abs(u(gen));
        const double d = std::abs(x - y);
        EXPECT_LE(std::abs(heat::noise_field(s, x) - heat::noise_field(s, y)), std::exp(-s) * d / 3.0 + 1e-15);
        EXPECT_LE(std::abs(heat::h1_field(2, s, x) - heat::h1_field(2, s, y)), d / 5.0 + 1e-15);
        EXPECT_LE(std::abs(heat::h2_field(2, s, x) - heat::h2_field(2, s, y)), 2.0 * d / 5.0 + 1e-15);
    }
}

TEST(HeatExample, LinearPartLipschitzOnSamples)
{
    // ||K(s,y1) - K(s,y2)||^2 <= L_K ||y1 - y2||_beta^2
    HeatExampleOptions o;
    o.modes = 12;
    const auto spec = build_heat_example(o);
    std::mt19937_64 gen(21);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 100; ++i) {
        SpectralVector a = SpectralVector::zeros(12), b = SpectralVector::zeros(12);
        for (std::size_t j = 0; j < 12; ++j) {
            a[j] = nd(gen) / static_cast<double>(j + 1);
            b[j] = nd(gen) / static_cast<double>(j + 1);
        }
        const double s = 0.05 * i;
        const auto dk = spec.nonlin.K(s, a) - spec.nonlin.K(s, b);
        const double lhs = h_beta_norm_sq(spec.spectrum, dk, {0.0});
        const double rhs = spec.nonlin.constants.L_K * h_beta_norm_sq(spec.spectrum, a - b, {spec.beta});
        EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
    }
}

TEST(HeatExample, ImpulseBoundInL2)
{
    // ||h_k^1(s, y)||^2 <= C_{h1,k} in L^2(0,1), up to collocation error
    HeatExampleOptions o;
    o.modes = 32;
    o.schedule = ImpulseSchedule{{0.3}, {0.4}, 1.0};
    const auto spec = build_heat_example(o);
    std::mt19937_64 gen(8);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 20; ++i) {
        SpectralVector y = SpectralVector::zeros(32);
        for (std::size_t j = 0; j < 4; ++j) y[j] = nd(gen);
        const auto h = spec.nonlin.h1(1, 0.35, y);
        EXPECT_LE(h_beta_norm_sq(spec.spectrum, h, {0.0}), spec.nonlin.constants.C_h1[0] * 1.05);
    }
}

TEST(Collocation, RoundTripInSpan)
{
    const SineCollocation col(8);
    SpectralVector v({1.0, -0.5, 0.25, 0.0, 0.3, -0.1, 0.05, 0.02});
    const auto back = col.analyze(col.synthesize(v));
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(back[j], v[j], 1e-13);
    // field of psi_0 at the nodes
    const auto f = col.synthesize(SpectralVector::unit(8, 0));
    for (std::size_t i = 0; i < col.points(); ++i)
        EXPECT_NEAR(f[i], std::numbers::sqrt2 * std::sin(std::numbers::pi * col.node(i)), 1e-14);
    const auto twice = col.apply_pointwise(v, [](double x) { return 2.0 * x; });
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(twice[j], 2.0 * v[j], 1e-13);
}

TEST(ScalarExample, ConstantsAndShape)
{
    ScalarExampleOptions o;
    o.a1 = 4.0;
    o.a2 = 0.5;
    o.a3 = 0.25;
    o.g = [](double, double y) { return 0.1 * std::sin(y); };
    o.g_lipschitz = 0.1;
    o.g_bound = 0.1;
    o.r = [](double s) { return std::exp(-s); };
    o.r_sup = 1.0;
    o.schedule = ImpulseSchedule{{0.3}, {0.5}, 1.0};
    const auto spec = build_scalar_example(o);
    EXPECT_EQ(spec.modes(), 1u);
    EXPECT_EQ(spec.alpha, 2.0);
    const auto& c = spec.nonlin.constants;
    EXPECT_DOUBLE_EQ(c.L_K_prime, 0.25);
    EXPECT_DOUBLE_EQ(c.L_N(0.3), 0.01 / 4.0);
    EXPECT_DOUBLE_EQ(c.L_N_prime(0.3), 0.01);
    EXPECT_DOUBLE_EQ(c.D_h1[0], 0.0625);
    EXPECT_DOUBLE_EQ(spec.nonlin.K(std::numbers::pi / 2.0, spec.y0)[0], -0.5);
    // the effective kernel carries the e^{-t} factor
    EXPECT_NEAR(spec.nonlin.a(1.0), std::exp(-1.0), 1e-15);
    ScalarExampleOptions bad;
    bad.a1 = 0.0;
    EXPECT_THROW(build_scalar_example(bad), ParameterError);
}

TEST(ComputeConstants, HeatExampleIsConsistent)
{
    HeatExampleOptions o;
    o.modes = 8;
    o.alpha = 2.0;
    o.beta = 0.5;
    o.schedule = ImpulseSchedule{{}, {}, 0.5};
    const auto spec = build_heat_example(o);
    const auto L = compute_constants(spec);
    EXPECT_NEAR(L.in.M, 1.0, 1e-12);
    EXPECT_NEAR(L.in.norm_A_beta_m1, 1.0 / std::numbers::pi, 1e-15);
    // ||a^2||_{L^2(0,T)} for a = e^{-t}
    EXPECT_NEAR(L.in.a2_Lp, std::sqrt((1.0 - std::exp(-2.0)) / 4.0), 1e-9);
    EXPECT_EQ(L.q(), 0u);
    EXPECT_NEAR(L.truncation_tail, std::pow(64.0 * kPi2, -0.5), 1e-15);
}

} // namespace
