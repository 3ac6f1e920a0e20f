#pragma once

// Problem instances: impulse schedule, nonlinearities with their declared
// Lipschitz/growth constants, noise covariance and initial data; the a-priori
// constants (rho, N_k, Q_k, D, R, M') and the feasibility conditions built
// from them; the heat-type and scalar control examples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/noise.hpp"
#include "fgsim/operator_families.hpp"
#include "fgsim/spectral_space.hpp"

namespace fgsim {

/// Impulse intervals (s_k, sigma_k], k = 1..q, inside [0, T]:
/// 0 < s_1 < sigma_1 < s_2 < ... < sigma_q < T. Stored zero-based.
struct ImpulseSchedule {
    std::vector<double> s_points;
    std::vector<double> sigma_points;
    double horizon = 1.0;

    std::size_t q() const { return s_points.size(); }

    /// Right end of the k-th evolution interval: s_{k+1}, with s_{q+1} = T.
    double evolution_end(std::size_t k) const { return k < q() ? s_points[k] : horizon; }
    /// Left end of the k-th evolution interval: 0 for k = 0, sigma_k otherwise.
    double evolution_start(std::size_t k) const { return k == 0 ? 0.0 : sigma_points[k - 1]; }

    void validate() const
    {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("schedule: horizon must be positive");
        if (s_points.size() != sigma_points.size())
            throw ParameterError("schedule: impulse onsets and ends differ in count");
        double prev = 0.0;
        for (std::size_t k = 0; k < q(); ++k) {
            if (!(s_points[k] > prev)) throw ParameterError("schedule: onsets/ends must be strictly increasing from 0");
            if (!(sigma_points[k] > s_points[k])) throw ParameterError("schedule: impulse end must follow its onset");
            prev = sigma_points[k];
        }
        if (!(horizon > prev)) throw ParameterError("schedule: last impulse must end before the horizon");
    }
};

/// Memory kernel a(t) of the stochastic convolution. The exponential form
/// c e^{-mu t} lets the solver update the convolution in O(1) per step.
struct Kernel {
    enum class Kind { exponential, general };
    Kind kind = Kind::exponential;
    double amplitude = 1.0;
    double rate = 1.0;
    std::function<double(double)> fn;
    std::string label = "exp";

    static Kernel exponential(double amplitude, double rate)
    {
        Kernel k;
        k.amplitude = amplitude;
        k.rate = rate;
        k.label = "exponential";
        return k;
    }
    static Kernel general(std::function<double(double)> f, std::string label = "general")
    {
        Kernel k;
        k.kind = Kind::general;
        k.fn = std::move(f);
        k.label = std::move(label);
        return k;
    }

    double operator()(double t) const
    {
        return kind == Kind::exponential ? amplitude * std::exp(-rate * t) : fn(t);
    }
};

using StateMap = std::function<SpectralVector(double, const SpectralVector&)>;
/// Returns per-noise-mode coefficients v_j; the noise operator acts as
/// N(s, y) e_j = v_j psi_j.
using NoiseMap = std::function<std::vector<double>(double, const SpectralVector&)>;
/// Impulse map h_k^i(s, y(s_k^-)); k is one-based as in the schedule.
using ImpulseMap = std::function<SpectralVector(std::size_t, double, const SpectralVector&)>;

/// Lipschitz and growth constants consumed by the a-priori estimates. They are
/// declared inputs; the library never estimates them.
struct DeclaredConstants {
    double L_K = 0.0;
    double L_K_prime = 0.0;
    std::function<double(double)> L_N;        // time-dependent, in L^q
    std::function<double(double)> L_N_prime;
    std::vector<double> D_h1, D_h2, C_h1, C_h2; // one per impulse
    double holder_q = 2.0;                      // p = q / (q - 1)

    double holder_p() const { return holder_q / (holder_q - 1.0); }
};

struct NonlinearitySpec {
    StateMap K;        // empty = zero
    NoiseMap N;        // empty = zero
    Kernel a = Kernel::exponential(1.0, 1.0);
    ImpulseMap h1;     // empty = zero
    ImpulseMap h2;
    DeclaredConstants constants;
};

struct ProblemSpec {
    std::string name = "custom";
    Spectrum spectrum;
    double alpha = 2.0;
    double beta = 0.5;
    double eta = 0.75;
    ImpulseSchedule schedule;
    NonlinearitySpec nonlin;
    CovarianceSpec cov;
    SpectralVector y0;
    SpectralVector z0;

    std::size_t modes() const { return spectrum.modes(); }
    FamilyParams family() const { return FamilyParams{alpha, spectrum}; }

    void validate() const
    {
        spectrum.validate();
        if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("problem: alpha must lie in (1, 2]");
        if (!(beta > 0.0 && beta < eta && eta < 1.0)) throw ParameterError("problem: need 0 < beta < eta < 1");
        schedule.validate();
        cov.validate();
        if (cov.modes() > modes()) throw ShapeError("problem: more noise modes than spectral modes");
        detail::check_dims(spectrum, y0);
        detail::check_dims(spectrum, z0);
        for (std::size_t j = 0; j < modes(); ++j) {
            const double l = spectrum.lambdas[j];
            if (!std::isfinite(l * y0[j]) || !std::isfinite(l * z0[j]))
                throw ParameterError("problem: initial data must be finite in the graph norm of A");
        }
        const auto& c = nonlin.constants;
        if (c.L_K < 0.0 || c.L_K_prime < 0.0) throw ParameterError("problem: Lipschitz constants must be >= 0");
        if (!(c.holder_q > 1.0)) throw ParameterError("problem: Holder exponent q must exceed 1");
        const std::size_t q = schedule.q();
        for (const auto* v : {&c.D_h1, &c.D_h2, &c.C_h1, &c.C_h2}) {
            if (v->size() != q) throw ParameterError("problem: impulse constants must have one entry per impulse");
            for (double x : *v)
                if (x < 0.0) throw ParameterError("problem: impulse constants must be >= 0");
        }
    }
};

// ---------------------------------------------------------------------------
// Constants ledger

/// Everything the a-priori constants depend on, already reduced to numbers.
struct LedgerInputs {
    double M = 1.0;
    double rho = 0.0;
    double horizon = 1.0;
    std::vector<double> s_next;       // s_1 .. s_{q+1} (= T)
    double norm_A_beta_m1 = 1.0;      // ||A^{beta-1}||
    double norm_A_eta_m1 = 1.0;       // ||A^{eta-1}||
    double y0_beta_sq = 0.0, z0_beta_sq = 0.0;
    double y0_eta_sq = 0.0, z0_eta_sq = 0.0;
    double trace_Q = 0.0;
    double a2_Lp = 0.0;               // ||a^2||_{L^p(0,T)}
    double LN_Lq = 0.0;               // ||L_N||_{L^q(0,T)}
    double LN_prime_Lq = 0.0;         // ||L_N'||_{L^q(0,T)}
    double L_K = 0.0, L_K_prime = 0.0;
    std::vector<double> D_h1, D_h2, C_h1, C_h2;
};

struct ConstantsLedger {
    LedgerInputs in;
    std::vector<double> N;   // N_0 .. N_q
    std::vector<double> Q;   // Q_0 .. Q_q
    std::vector<double> Mk;  // M_0 .. M_q (N_k with eta in place of beta)
    double D = 0.0;
    double R_sq = 0.0;
    double R = 0.0;
    double M_prime = 0.0;
    double truncation_tail = 0.0; // lambda_{N_max-1}^{-2(eta-beta)}, informational

    std::size_t q() const { return in.s_next.empty() ? 0 : in.s_next.size() - 1; }
};

/// Plugs the inputs into the a-priori constant formulas:
///   N_0 = 4{M^2|y0|_b^2 + M^2T^2|z0|_b^2 + |A^{b-1}|^2 rho^2 s_1 (L_K' + 4Tr(Q)|a^2|_p |L_N'|_q)}
///   N_k = 4{M^2 C_{h1,k} + M^2T^2 C_{h2,k} + |A^{b-1}|^2 rho^2 s_{k+1} (L_K' + 4Tr(Q)|a^2|_p |L_N'|_q)}
///   Q_0 = 2{|A^{b-1}|^2 rho^2 s_1 (L_K + 4Tr(Q)|L_N|_q |a^2|_p)}
///   Q_k = 4{M^2 D_{h1,k} + M^2T^2 D_{h2,k} + |A^{b-1}|^2 rho^2 s_{k+1} (L_K + 4Tr(Q)|L_N|_q |a^2|_p)}
///   D = max(max_k Q_k, max_k D_{h1,k}),  R^2 = max(max_k N_k, max_k C_{h1,k}),
///   M' = max(max_k M_k, max_k C_{h1,k}) with M_k = N_k evaluated with eta for beta.
inline ConstantsLedger assemble_constants(const LedgerInputs& in)
{
    if (in.s_next.empty()) throw ParameterError("ledger: s_next must hold at least s_{q+1} = T");
    const std::size_t q = in.s_next.size() - 1;
    for (const auto* v : {&in.D_h1, &in.D_h2, &in.C_h1, &in.C_h2})
        if (v->size() != q) throw ParameterError("ledger: impulse constants must have one entry per impulse");

    ConstantsLedger L;
    L.in = in;
    const double M2 = in.M * in.M;
    const double T2 = in.horizon * in.horizon;
    const double rho2 = in.rho * in.rho;
    const double growth = in.L_K_prime + 4.0 * in.trace_Q * in.a2_Lp * in.LN_prime_Lq;
    const double lipschitz = in.L_K + 4.0 * in.trace_Q * in.LN_Lq * in.a2_Lp;
    const double nb = in.norm_A_beta_m1 * in.norm_A_beta_m1;
    const double ne = in.norm_A_eta_m1 * in.norm_A_eta_m1;

    L.N.resize(q + 1);
    L.Q.resize(q + 1);
    L.Mk.resize(q + 1);
    L.N[0] = 4.0 * (M2 * in.y0_beta_sq + M2 * T2 * in.z0_beta_sq + nb * rho2 * in.s_next[0] * growth);
    L.Mk[0] = 4.0 * (M2 * in.y0_eta_sq + M2 * T2 * in.z0_eta_sq + ne * rho2 * in.s_next[0] * growth);
    L.Q[0] = 2.0 * (nb * rho2 * in.s_next[0] * lipschitz);
    for (std::size_t k = 1; k <= q; ++k) {
        const double sk = in.s_next[k];
        L.N[k] = 4.0 * (M2 * in.C_h1[k - 1] + M2 * T2 * in.C_h2[k - 1] + nb * rho2 * sk * growth);
        L.Mk[k] = 4.0 * (M2 * in.C_h1[k - 1] + M2 * T2 * in.C_h2[k - 1] + ne * rho2 * sk * growth);
        L.Q[k] = 4.0 * (M2 * in.D_h1[k - 1] + M2 * T2 * in.D_h2[k - 1] + nb * rho2 * sk * lipschitz);
    }
    L.D = *std::max_element(L.Q.begin(), L.Q.end());
    L.R_sq = *std::max_element(L.N.begin(), L.N.end());
    L.M_prime = *std::max_element(L.Mk.begin(), L.Mk.end());
    for (std::size_t k = 0; k < q; ++k) {
        L.D = std::max(L.D, in.D_h1[k]);
        L.R_sq = std::max(L.R_sq, in.C_h1[k]);
        L.M_prime = std::max(L.M_prime, in.C_h1[k]);
    }
    L.R = std::sqrt(L.R_sq);
    return L;
}

namespace detail {

/// Composite Simpson rule for int_0^T f with `intervals` (rounded up to even).
inline double simpson(const std::function<double(double)>& f, double T, std::size_t intervals)
{
    if (intervals < 2) intervals = 2;
    if (intervals % 2) ++intervals;
    const double h = T / static_cast<double>(intervals);
    double acc = f(0.0) + f(T);
    for (std::size_t i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(h * static_cast<double>(i));
    return acc * h / 3.0;
}

/// ||f||_{L^r(0,T)} by Simpson quadrature.
inline double lr_norm(const std::function<double(double)>& f, double r, double T, std::size_t intervals)
{
    if (!f) return 0.0;
    const double integral = simpson([&](double t) { return std::pow(std::abs(f(t)), r); }, T, intervals);
    const double v = std::pow(integral, 1.0 / r);
    if (!std::isfinite(v)) throw ConfigurationError("Holder norm is not finite");
    return v;
}

} // namespace detail

/// Evaluates M and rho on a grid (see estimate_bounds), the Holder norms by
/// Simpson quadrature on `bound_grid` intervals, and assembles the ledger.
inline ConstantsLedger compute_constants(const ProblemSpec& spec, std::size_t bound_grid = 256)
{
    spec.validate();
    const double T = spec.schedule.horizon;
    const auto bounds = estimate_bounds(spec.family(), T, std::max<std::size_t>(bound_grid, 16));
    const auto& c = spec.nonlin.constants;

    LedgerInputs in;
    in.M = bounds.M;
    in.rho = bounds.rho;
    in.horizon = T;
    for (std::size_t k = 0; k <= spec.schedule.q(); ++k) in.s_next.push_back(spec.schedule.evolution_end(k));
    in.norm_A_beta_m1 = frac_power_norm(spec.spectrum, spec.beta - 1.0);
    in.norm_A_eta_m1 = frac_power_norm(spec.spectrum, spec.eta - 1.0);
    in.y0_beta_sq = h_beta_norm_sq(spec.spectrum, spec.y0, {spec.beta});
    in.z0_beta_sq = h_beta_norm_sq(spec.spectrum, spec.z0, {spec.beta});
    in.y0_eta_sq = h_beta_norm_sq(spec.spectrum, spec.y0, {spec.eta});
    in.z0_eta_sq = h_beta_norm_sq(spec.spectrum, spec.z0, {spec.eta});
    in.trace_Q = spec.cov.trace();
    const double p = c.holder_p(), qh = c.holder_q;
    const auto& a = spec.nonlin.a;
    in.a2_Lp = detail::lr_norm([&](double t) { return a(t) * a(t); }, p, T, bound_grid);
    in.LN_Lq = detail::lr_norm(c.L_N, qh, T, bound_grid);
    in.LN_prime_Lq = detail::lr_norm(c.L_N_prime, qh, T, bound_grid);
    in.L_K = c.L_K;
    in.L_K_prime = c.L_K_prime;
    in.D_h1 = c.D_h1;
    in.D_h2 = c.D_h2;
    in.C_h1 = c.C_h1;
    in.C_h2 = c.C_h2;

    ConstantsLedger L = assemble_constants(in);
    L.truncation_tail = std::pow(spec.spectrum.lambdas.back(), -2.0 * (spec.eta - spec.beta));
    for (double x : {L.D, L.R, L.M_prime})
        if (!std::isfinite(x)) throw ConfigurationError("constants ledger is not finite");
    return L;
}

struct FeasibilityReport {
    double D = 0.0;
    double R = 0.0;
    bool contraction = false;               // D < 1
    std::vector<bool> bound_denominators;   // 2 Q_k < 1, k = 0..q
    std::vector<bool> impulse_denominators; // 2 D_{h1,k} < 1, k = 1..q
    bool bounds_valid = false;              // all denominators positive

    bool feasible() const { return contraction && bounds_valid; }
};

inline FeasibilityReport feasibility_check(const ConstantsLedger& L)
{
    FeasibilityReport r;
    r.D = L.D;
    r.R = L.R;
    r.contraction = L.D < 1.0;
    r.bounds_valid = true;
    for (double q : L.Q) {
        r.bound_denominators.push_back(2.0 * q < 1.0);
        r.bounds_valid = r.bounds_valid && 2.0 * q < 1.0;
    }
    for (double d : L.in.D_h1) {
        r.impulse_denominators.push_back(2.0 * d < 1.0);
        r.bounds_valid = r.bounds_valid && 2.0 * d < 1.0;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Pseudo-spectral evaluation of pointwise maps on (0,1)

/// Collocation on xi_i = i/(P+1), i = 1..P, with P = 2 * modes, for the basis
/// psi_j = sqrt(2) sin((j+1) pi xi). Synthesis evaluates the field at the
/// nodes; analysis is the discrete sine transform, exact for fields in the
/// span of the first P basis functions.
class SineCollocation {
public:
    explicit SineCollocation(std::size_t modes) : modes_(modes), points_(2 * modes), table_(points_ * modes)
    {
        const double step = std::numbers::pi / static_cast<double>(points_ + 1);
        for (std::size_t i = 0; i < points_; ++i)
            for (std::size_t j = 0; j < modes_; ++j)
                table_[i * modes_ + j] = std::sin(static_cast<double>((i + 1) * (j + 1)) * step);
    }

    std::size_t modes() const { return modes_; }
    std::size_t points() const { return points_; }
    double node(std::size_t i) const { return static_cast<double>(i + 1) / static_cast<double>(points_ + 1); }

    std::vector<double> synthesize(const SpectralVector& v) const
    {
        if (v.size() != modes_) throw ShapeError("collocation: coefficient count mismatch");
        std::vector<double> f(points_, 0.0);
        for (std::size_t i = 0; i < points_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < modes_; ++j) acc += v[j] * table_[i * modes_ + j];
            f[i] = std::numbers::sqrt2 * acc;
        }
        return f;
    }

    SpectralVector analyze(const std::vector<double>& f) const
    {
        if (f.size() != points_) throw ShapeError("collocation: field sample count mismatch");
        SpectralVector v = SpectralVector::zeros(modes_);
        const double scale = std::numbers::sqrt2 / static_cast<double>(points_ + 1);
        for (std::size_t j = 0; j < modes_; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < points_; ++i) acc += f[i] * table_[i * modes_ + j];
            v[j] = scale * acc;
        }
        return v;
    }

    template <class F>
    SpectralVector apply_pointwise(const SpectralVector& v, F&& f) const
    {
        std::vector<double> field = synthesize(v);
        for (double& x : field) x = f(x);
        return analyze(field);
    }

private:
    std::size_t modes_;
    std::size_t points_;
    std::vector<double> table_;
};

// ---------------------------------------------------------------------------
// Builtin examples

/// Pointwise maps of the heat-type example, applied to a field value v.
namespace heat {

inline double K_factor(double s) { return s / (10.0 * (1.0 + s)); }
inline double noise_field(double s, double v) { return std::exp(-s) * std::abs(v) / (3.0 * (1.0 + std::abs(v))); }
inline double h1_field(std::size_t k, double s, double v)
{
    const double kk = static_cast<double>(k);
    return std::sin(kk * s + v) / (2.0 * kk + 1.0);
}
inline double h2_field(std::size_t k, double s, double v)
{
    const double kk = static_cast<double>(k);
    return kk * std::cos(kk * s + v) / (2.0 * kk + 1.0);
}

} // namespace heat

struct HeatExampleOptions {
    std::size_t modes = 16;
    ImpulseSchedule schedule{{}, {}, 1.0};
    Kernel a = Kernel::exponential(1.0, 1.0);
    double alpha = 1.9;
    double beta = 0.5;
    double eta = 0.75;
    double noise_scale = 0.1;   // q_j = noise_scale / (j+1)^2
    double y0_amplitude = 1.0;  // y0_j = y0_amplitude / (j+1)^3
    double z0_amplitude = 0.0;  // z0_j = z0_amplitude / (j+1)^3
    double ball_radius = 1.0;   // declared radius r with E||y||_beta^2 <= r^2 inside the ball
    double holder_q = 2.0;
};

/// Heat-type example on (0,1): lambda_j = (j+1)^2 pi^2,
///   K(s,y) = s/(10(1+s)) y,   N(s,y) = e^{-s}|y|/(3(1+|y|)),
///   h_k^1(s,y) = sin(ks + y)/(2k+1),   h_k^2(s,y) = k cos(ks + y)/(2k+1),
/// with the pointwise maps evaluated by sine collocation. Declared constants:
///   L_K = |A^{-beta}|^2/100, L_K' = L_K r^2, L_N(s) = e^{-2s}|A^{-beta}|^2/9,
///   L_N'(s) = e^{-2s}/9, D_{h_k^1} = C_{h_k^1} = 1/(2k+1)^2,
///   D_{h_k^2} = C_{h_k^2} = (k/(2k+1))^2.
inline ProblemSpec build_heat_example(const HeatExampleOptions& opt)
{
    detail::require(opt.modes >= 1, "heat example: modes must be >= 1");
    ProblemSpec spec;
    spec.name = "heat6";
    spec.spectrum = Spectrum::dirichlet_laplacian(opt.modes);
    spec.alpha = opt.alpha;
    spec.beta = opt.beta;
    spec.eta = opt.eta;
    spec.schedule = opt.schedule;
    spec.y0 = SpectralVector::zeros(opt.modes);
    spec.z0 = SpectralVector::zeros(opt.modes);
    spec.cov.q_eigs.resize(opt.modes);
    for (std::size_t j = 0; j < opt.modes; ++j) {
        const double w = static_cast<double>(j + 1);
        spec.y0[j] = opt.y0_amplitude / (w * w * w);
        spec.z0[j] = opt.z0_amplitude / (w * w * w);
        spec.cov.q_eigs[j] = opt.noise_scale / (w * w);
    }

    auto col = std::make_shared<const SineCollocation>(opt.modes);
    auto& nl = spec.nonlin;
    nl.a = opt.a;
    nl.K = [](double s, const SpectralVector& y) { return heat::K_factor(s) * y; };
    nl.N = [col](double s, const SpectralVector& y) {
        return col->apply_pointwise(y, [s](double v) { return heat::noise_field(s, v); }).coeffs;
    };
    nl.h1 = [col](std::size_t k, double s, const SpectralVector& y) {
        return col->apply_pointwise(y, [k, s](double v) { return heat::h1_field(k, s, v); });
    };
    nl.h2 = [col](std::size_t k, double s, const SpectralVector& y) {
        return col->apply_pointwise(y, [k, s](double v) { return heat::h2_field(k, s, v); });
    };

    auto& c = nl.constants;
    const double inv = frac_power_norm(spec.spectrum, -opt.beta);
    const double inv2 = inv * inv;
    c.L_K = inv2 / 100.0;
    c.L_K_prime = c.L_K * opt.ball_radius * opt.ball_radius;
    c.L_N = [inv2](double s) { return std::exp(-2.0 * s) * inv2 / 9.0; };
    c.L_N_prime = [](double s) { return std::exp(-2.0 * s) / 9.0; };
    c.holder_q = opt.holder_q;
    for (std::size_t k = 1; k <= spec.schedule.q(); ++k) {
        const double kk = static_cast<double>(k);
        const double d1 = 1.0 / ((2.0 * kk + 1.0) * (2.0 * kk + 1.0));
        const double d2 = (kk / (2.0 * kk + 1.0)) * (kk / (2.0 * kk + 1.0));
        c.D_h1.push_back(d1);
        c.C_h1.push_back(d1);
        c.D_h2.push_back(d2);
        c.C_h2.push_back(d2);
    }
    spec.validate();
    return spec;
}

inline ProblemSpec build_heat_example(std::size_t modes, const ImpulseSchedule& schedule, const Kernel& a)
{
    HeatExampleOptions opt;
    opt.modes = modes;
    opt.schedule = schedule;
    opt.a = a;
    return build_heat_example(opt);
}

struct ScalarExampleOptions {
    double a1 = 1.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double x0 = 1.0;            // y(0)
    double v0 = 0.0;            // y'(0)
    std::function<double(double, double)> g;   // noise amplitude g(s, y); empty = 0
    double g_lipschitz = 0.0;   // |g(s,y) - g(s,x)| <= g_lipschitz |y - x|
    double g_bound = 0.0;       // |g(s,y)| <= g_bound
    std::function<double(double)> r;           // impulse profile; empty = 0
    std::function<double(double)> r_prime;
    double r_sup = 0.0;
    double r_prime_sup = 0.0;
    Kernel a = Kernel::exponential(1.0, 0.0); // user kernel; the equation uses a(t) e^{-t}
    double noise_variance = 1.0;
    ImpulseSchedule schedule{{}, {}, 1.0};
    double beta = 0.5;
    double eta = 0.75;
    double holder_q = 2.0;
};

/// Scalar control example y'' + a1 y + a2 sin s = int_0^s a(s-r) e^{-(s-r)} g(r, y) dW(r)
/// with impulses y = a3 tanh(y(s_k^-)) r(s), y' = a3 tanh(y(s_k^-)) r'(s).
/// One mode with lambda_0 = a1 and alpha = 2, so C(s) = cos(sqrt(a1) s).
inline ProblemSpec build_scalar_example(const ScalarExampleOptions& opt)
{
    if (!(opt.a1 > 0.0)) throw ParameterError("scalar example: a1 must be positive");
    ProblemSpec spec;
    spec.name = "scalar6";
    spec.spectrum.lambdas = {opt.a1};
    spec.alpha = 2.0;
    spec.beta = opt.beta;
    spec.eta = opt.eta;
    spec.schedule = opt.schedule;
    spec.y0 = SpectralVector({opt.x0});
    spec.z0 = SpectralVector({opt.v0});
    spec.cov.q_eigs = {opt.noise_variance};

    auto& nl = spec.nonlin;
    if (opt.a.kind == Kernel::Kind::exponential) {
        nl.a = Kernel::exponential(opt.a.amplitude, opt.a.rate + 1.0);
    } else {
        auto f = opt.a.fn;
        nl.a = Kernel::general([f](double t) { return f(t) * std::exp(-t); }, opt.a.label + "*exp");
    }
    const double a2 = opt.a2, a3 = opt.a3;
    if (a2 != 0.0) nl.K = [a2](double s, const SpectralVector&) { return SpectralVector({-a2 * std::sin(s)}); };
    if (opt.g) {
        auto g = opt.g;
        nl.N = [g](double s, const SpectralVector& y) { return std::vector<double>{g(s, y[0])}; };
    }
    if (opt.r && a3 != 0.0) {
        auto r = opt.r;
        nl.h1 = [r, a3](std::size_t, double s, const SpectralVector& y) {
            return SpectralVector({a3 * std::tanh(y[0]) * r(s)});
        };
    }
    if (opt.r_prime && a3 != 0.0) {
        auto rp = opt.r_prime;
        nl.h2 = [rp, a3](std::size_t, double s, const SpectralVector& y) {
            return SpectralVector({a3 * std::tanh(y[0]) * rp(s)});
        };
    }

    auto& c = nl.constants;
    const double w2b = std::pow(opt.a1, 2.0 * opt.beta); // ||y||_beta^2 = a1^{2 beta} y^2
    c.L_K = 0.0;
    c.L_K_prime = a2 * a2;
    const double lip2 = opt.g_lipschitz * opt.g_lipschitz / w2b;
    const double bound2 = opt.g_bound * opt.g_bound;
    c.L_N = [lip2](double) { return lip2; };
    c.L_N_prime = [bound2](double) { return bound2; };
    c.holder_q = opt.holder_q;
    for (std::size_t k = 0; k < spec.schedule.q(); ++k) {
        c.D_h1.push_back(a3 * a3 * opt.r_sup * opt.r_sup);
        c.D_h2.push_back(a3 * a3 * opt.r_prime_sup * opt.r_prime_sup);
        c.C_h1.push_back(w2b * a3 * a3 * opt.r_sup * opt.r_sup);
        c.C_h2.push_back(w2b * a3 * a3 * opt.r_prime_sup * opt.r_prime_sup);
    }
    spec.validate();
    return spec;
}

} // namespace fgsim
