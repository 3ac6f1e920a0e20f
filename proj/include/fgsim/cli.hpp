#pragma once

// Run configuration (INI text, sections problem/numerics/experiment/output),
// builtin problems and the experiment driver behind the fgsim executable.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fgsim/errors.hpp"
#include "fgsim/fractional_calculus.hpp"
#include "fgsim/harness.hpp"
#include "fgsim/problem.hpp"
#include "fgsim/solver.hpp"

namespace fgsim {

/// Malformed or invalid configuration text (exit status 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_infeasible = 3, exit_numerical = 4 };

struct RunConfig {
    // [problem]
    std::string builtin = "heat6";
    double alpha = 1.9;
    double beta = 0.25;
    double eta = 0.75;
    double horizon = 0.1;
    std::vector<double> impulse_onsets;
    std::vector<double> impulse_ends;
    double kernel_amplitude = 1.0;
    double kernel_rate = 1.0;
    double noise_scale = 0.1;
    double y0_amplitude = 1.0;
    double z0_amplitude = 0.0;
    double ball_radius = 1.0;
    double holder_q = 2.0;
    // scalar6 only
    double a1 = std::numbers::pi * std::numbers::pi;
    double a2 = 0.5;
    double a3 = 0.5;
    double x0 = 1.0;
    double v0 = 0.0;
    double g_amplitude = 0.1;

    // [numerics]
    std::size_t modes = 32;
    std::size_t galerkin_n = 8;
    std::size_t steps_per_interval = 50;
    double picard_tol = 1e-12;
    std::size_t picard_max_iter = 100;
    std::size_t mc_samples = 200;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::size_t bound_grid = 256;

    // [experiment]
    std::string experiment = "solve";
    std::vector<std::size_t> m_values{2, 4, 8, 16};
    std::size_t ratio = 2;
    std::vector<std::size_t> n_values{2, 4, 8};
    std::size_t n_ref = 32;

    // [output]
    std::string out_dir = "fgsim_out";
    bool svg = true;

    void validate() const
    {
        static const std::set<std::string> builtins{"heat6", "scalar6"};
        static const std::set<std::string> experiments{"solve", "converge", "coeffs", "constants", "mlcheck"};
        if (!builtins.count(builtin)) throw ConfigError("unknown builtin problem '" + builtin + "'");
        if (!experiments.count(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
        auto positive = [](double x, const char* what) {
            if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be positive");
        };
        positive(horizon, "horizon");
        positive(picard_tol, "picard_tol");
        positive(holder_q - 1.0, "holder_q - 1");
        for (auto [v, what] : {std::pair{modes, "modes"}, {steps_per_interval, "steps_per_interval"},
                               {picard_max_iter, "picard_max_iter"}, {mc_samples, "mc_samples"},
                               {ratio, "ratio"}, {bound_grid, "bound_grid"}})
            if (v == 0) throw ConfigError(std::string(what) + " must be positive");
        if (galerkin_n > modes) throw ConfigError("galerkin_n exceeds modes");
        if (impulse_onsets.size() != impulse_ends.size())
            throw ConfigError("impulse_onsets and impulse_ends differ in length");
    }
};

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key)
{
    std::vector<T> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        std::istringstream ts(tok);
        T v{};
        if (!(ts >> v) || !ts.eof()) throw ConfigError("cannot parse '" + tok + "' in " + key);
        out.push_back(v);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        if constexpr (std::is_floating_point_v<T>) s += fmt17(v[i]);
        else s += std::to_string(v[i]);
    }
    return s;
}

template <class T>
T parse_scalar(const std::string& text, const std::string& key)
{
    if constexpr (std::is_same_v<T, std::string>) {
        return text;
    } else if constexpr (std::is_same_v<T, bool>) {
        if (text == "true" || text == "1" || text == "yes") return true;
        if (text == "false" || text == "0" || text == "no") return false;
        throw ConfigError("cannot parse boolean '" + text + "' in " + key);
    } else {
        std::istringstream is(text);
        T v{};
        if (!(is >> v) || !(is >> std::ws).eof()) throw ConfigError("cannot parse '" + text + "' in " + key);
        if constexpr (std::is_unsigned_v<T>)
            if (text.find('-') != std::string::npos) throw ConfigError(key + " must be nonnegative");
        return v;
    }
}

/// Visits every config field with its section-qualified key.
template <class Visit>
void for_each_field(RunConfig& c, Visit&& v)
{
    v("problem.builtin", c.builtin);
    v("problem.alpha", c.alpha);
    v("problem.beta", c.beta);
    v("problem.eta", c.eta);
    v("problem.horizon", c.horizon);
    v("problem.impulse_onsets", c.impulse_onsets);
    v("problem.impulse_ends", c.impulse_ends);
    v("problem.kernel_amplitude", c.kernel_amplitude);
    v("problem.kernel_rate", c.kernel_rate);
    v("problem.noise_scale", c.noise_scale);
    v("problem.y0_amplitude", c.y0_amplitude);
    v("problem.z0_amplitude", c.z0_amplitude);
    v("problem.ball_radius", c.ball_radius);
    v("problem.holder_q", c.holder_q);
    v("problem.a1", c.a1);
    v("problem.a2", c.a2);
    v("problem.a3", c.a3);
    v("problem.x0", c.x0);
    v("problem.v0", c.v0);
    v("problem.g_amplitude", c.g_amplitude);
    v("numerics.modes", c.modes);
    v("numerics.galerkin_n", c.galerkin_n);
    v("numerics.steps_per_interval", c.steps_per_interval);
    v("numerics.picard_tol", c.picard_tol);
    v("numerics.picard_max_iter", c.picard_max_iter);
    v("numerics.mc_samples", c.mc_samples);
    v("numerics.seed", c.seed);
    v("numerics.threads", c.threads);
    v("numerics.bound_grid", c.bound_grid);
    v("experiment.name", c.experiment);
    v("experiment.m_values", c.m_values);
    v("experiment.ratio", c.ratio);
    v("experiment.n_values", c.n_values);
    v("experiment.n_ref", c.n_ref);
    v("output.dir", c.out_dir);
    v("output.svg", c.svg);
}

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

} // namespace detail

inline RunConfig config_from_ptree(const boost::property_tree::ptree& pt)
{
    RunConfig c;
    std::set<std::string> known;
    detail::for_each_field(c, [&](const std::string& key, auto& field) {
        known.insert(key);
        const auto text = pt.get_optional<std::string>(key);
        if (!text) return;
        using T = std::decay_t<decltype(field)>;
        if constexpr (detail::is_vector<T>::value) field = detail::parse_list<typename T::value_type>(*text, key);
        else field = detail::parse_scalar<T>(*text, key);
    });
    for (const auto& [section, body] : pt) {
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, value] : body)
            if (!known.count(section + "." + key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
    }
    c.validate();
    return c;
}

inline RunConfig load_config(std::istream& is)
{
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_ptree(pt);
}

inline RunConfig load_config_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return load_config(is);
}

/// Every field, defaults included, in re-loadable INI form.
inline boost::property_tree::ptree config_to_ptree(const RunConfig& cfg)
{
    boost::property_tree::ptree pt;
    RunConfig c = cfg;
    detail::for_each_field(c, [&](const std::string& key, auto& field) {
        using T = std::decay_t<decltype(field)>;
        if constexpr (detail::is_vector<T>::value) pt.put(key, detail::join(field));
        else if constexpr (std::is_same_v<T, std::string>) pt.put(key, field);
        else if constexpr (std::is_same_v<T, bool>) pt.put(key, field ? "true" : "false");
        else if constexpr (std::is_floating_point_v<T>) pt.put(key, detail::fmt17(field));
        else pt.put(key, std::to_string(field));
    });
    return pt;
}

inline ImpulseSchedule schedule_of(const RunConfig& c)
{
    return ImpulseSchedule{c.impulse_onsets, c.impulse_ends, c.horizon};
}

/// heat6: the heat-type example with config-driven order, exponents, horizon,
/// impulses and noise. scalar6: the scalar control example with
/// g(s,y) = g_amplitude, r(s) = e^{-s}, kernel a = kernel_amplitude e^{-kernel_rate t}.
inline ProblemSpec build_problem(const RunConfig& c)
{
    if (c.builtin == "heat6") {
        HeatExampleOptions o;
        o.modes = c.modes;
        o.schedule = schedule_of(c);
        o.a = Kernel::exponential(c.kernel_amplitude, c.kernel_rate);
        o.alpha = c.alpha;
        o.beta = c.beta;
        o.eta = c.eta;
        o.noise_scale = c.noise_scale;
        o.y0_amplitude = c.y0_amplitude;
        o.z0_amplitude = c.z0_amplitude;
        o.ball_radius = c.ball_radius;
        o.holder_q = c.holder_q;
        return build_heat_example(o);
    }
    ScalarExampleOptions o;
    o.a1 = c.a1;
    o.a2 = c.a2;
    o.a3 = c.a3;
    o.x0 = c.x0;
    o.v0 = c.v0;
    const double g = c.g_amplitude;
    o.g = [g](double, double) { return g; };
    o.g_lipschitz = 0.0;
    o.g_bound = std::abs(g);
    o.r = [](double s) { return std::exp(-s); };
    o.r_prime = [](double s) { return -std::exp(-s); };
    o.r_sup = 1.0;
    o.r_prime_sup = 1.0;
    o.a = Kernel::exponential(c.kernel_amplitude, c.kernel_rate);
    o.noise_variance = c.noise_scale;
    o.schedule = schedule_of(c);
    o.beta = c.beta;
    o.eta = c.eta;
    o.holder_q = c.holder_q;
    return build_scalar_example(o);
}

/// Ledger entries as (name, value) rows.
inline std::vector<std::pair<std::string, double>> ledger_rows(const ConstantsLedger& L)
{
    std::vector<std::pair<std::string, double>> r{
        {"M", L.in.M},
        {"rho", L.in.rho},
        {"norm_A_beta_minus_1", L.in.norm_A_beta_m1},
        {"norm_A_eta_minus_1", L.in.norm_A_eta_m1},
        {"trace_Q", L.in.trace_Q},
        {"a2_Lp", L.in.a2_Lp},
        {"L_N_Lq", L.in.LN_Lq},
        {"L_N_prime_Lq", L.in.LN_prime_Lq},
        {"L_K", L.in.L_K},
        {"L_K_prime", L.in.L_K_prime},
    };
    for (std::size_t k = 0; k < L.in.D_h1.size(); ++k) {
        const std::string s = std::to_string(k + 1);
        r.emplace_back("D_h1_" + s, L.in.D_h1[k]);
        r.emplace_back("D_h2_" + s, L.in.D_h2[k]);
        r.emplace_back("C_h1_" + s, L.in.C_h1[k]);
        r.emplace_back("C_h2_" + s, L.in.C_h2[k]);
    }
    for (std::size_t k = 0; k < L.N.size(); ++k) r.emplace_back("N_" + std::to_string(k), L.N[k]);
    for (std::size_t k = 0; k < L.Q.size(); ++k) r.emplace_back("Q_" + std::to_string(k), L.Q[k]);
    for (std::size_t k = 0; k < L.Mk.size(); ++k) r.emplace_back("M_" + std::to_string(k), L.Mk[k]);
    r.emplace_back("D", L.D);
    r.emplace_back("R", L.R);
    r.emplace_back("M_prime", L.M_prime);
    r.emplace_back("truncation_tail", L.truncation_tail);
    return r;
}

/// Identity checks of the Mittag-Leffler evaluation: (name, max error, tolerance).
struct MLCheckRow {
    std::string identity;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass() const { return max_error <= tolerance; }
};

inline std::vector<MLCheckRow> ml_identity_checks()
{
    std::vector<MLCheckRow> rows;
    {
        MLCheckRow r{"E_{1,1}(z) = exp(z), z in [-50,5]", 0.0, 1e-10};
        for (int i = 0; i < 500; ++i) {
            const double z = -50.0 + 55.0 * i / 499.0;
            const double e = std::exp(z);
            r.max_error = std::max(r.max_error, std::abs(ml(1.0, 1.0, z) - e) / std::max(1.0, e));
        }
        rows.push_back(r);
    }
    {
        MLCheckRow r{"E_{2,1}(-z^2) = cos(z), z in [0,50]", 0.0, 1e-9};
        for (int i = 0; i < 500; ++i) {
            const double z = 50.0 * i / 499.0;
            r.max_error = std::max(r.max_error, std::abs(ml(2.0, 1.0, -z * z) - std::cos(z)));
        }
        rows.push_back(r);
    }
    {
        MLCheckRow r{"E_{a,b}(z) = z E_{a,a+b}(z) + 1/Gamma(b), z in [-100,0]", 0.0, 1e-9};
        for (double a : {1.2, 1.5, 1.9})
            for (double b : {1.0, 2.0, a})
                for (int i = 0; i < 201; ++i) {
                    const double z = -100.0 * i / 200.0;
                    const double lhs = ml(a, b, z);
                    const double rhs = z * ml(a, a + b, z) + 1.0 / std::tgamma(b);
                    r.max_error = std::max(r.max_error, std::abs(lhs - rhs));
                }
        rows.push_back(r);
    }
    return rows;
}

/// Executes the configured experiment, writing manifest.ini and the
/// experiment's CSV (and SVG) into cfg.out_dir. Returns an ExitCode.
inline int run(const RunConfig& cfg, bool strict, std::ostream& log)
{
    namespace fs = std::filesystem;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    }

    ProblemSpec spec;
    ConstantsLedger ledger;
    FeasibilityReport feas;
    try {
        spec = build_problem(cfg);
        ledger = compute_constants(spec, cfg.bound_grid);
        feas = feasibility_check(ledger);
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const ShapeError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }

    fs::create_directories(cfg.out_dir);
    {
        boost::property_tree::ptree pt = config_to_ptree(cfg);
        for (const auto& [name, value] : ledger_rows(ledger)) pt.put("ledger." + name, detail::fmt17(value));
        pt.put("feasibility.D", detail::fmt17(feas.D));
        pt.put("feasibility.R", detail::fmt17(feas.R));
        pt.put("feasibility.contraction", feas.contraction ? "true" : "false");
        pt.put("feasibility.bounds_valid", feas.bounds_valid ? "true" : "false");
        pt.put("feasibility.strict", strict ? "true" : "false");
        std::ofstream os(fs::path(cfg.out_dir) / "manifest.ini");
        boost::property_tree::ini_parser::write_ini(os, pt);
    }
    log << "D = " << feas.D << ", R = " << feas.R << ", feasible = " << (feas.feasible() ? "yes" : "no") << "\n";
    if (strict && !feas.feasible()) {
        log << "infeasible configuration (strict mode)\n";
        return exit_infeasible;
    }

    try {
        const TimeGrid grid = TimeGrid::build(spec.schedule, cfg.steps_per_interval);
        PicardConfig picard;
        picard.tol = cfg.picard_tol;
        picard.max_iter = cfg.picard_max_iter;
        picard.D = ledger.D;
        picard.R = ledger.R;
        EnsembleConfig ens;
        ens.samples = cfg.mc_samples;
        ens.seed = cfg.seed;
        ens.threads = cfg.threads;
        ens.picard = picard;
        const fs::path dir(cfg.out_dir);

        if (cfg.experiment == "solve") {
            const WienerPath w = sample_wiener(spec.cov, grid.nodes, derive_seed(cfg.seed, 0));
            const PathSolution sol = solve(cfg.galerkin_n, spec, w, grid, picard);
            std::ofstream os(dir / "solution.csv");
            write_solution_csv(os, fg_project(sol, cfg.galerkin_n), spec, cfg.galerkin_n);
            log << "solve: " << sol.iterations << " Picard iterations, converged = " << sol.converged << "\n";
        } else if (cfg.experiment == "converge") {
            const ConvergenceReport rep = convergence_experiment(spec, grid, cfg.m_values, cfg.ratio, ens, ledger);
            std::ofstream os(dir / "convergence.csv");
            write_report_csv(os, rep);
            if (cfg.svg) {
                std::ofstream svg(dir / "convergence.svg");
                write_report_svg(svg, rep, -2.0 * (spec.eta - spec.beta));
            }
            log << "converge: " << rep.rows.size() << " rows\n";
        } else if (cfg.experiment == "coeffs") {
            const auto vals = coefficient_convergence(cfg.n_values, cfg.n_ref, spec, grid, ens);
            std::ofstream os(dir / "coefficients.csv");
            os << "# samples=" << ens.samples << "\n# seed=" << ens.seed << "\n# n_ref=" << cfg.n_ref << "\n";
            os << "n,weighted_coefficient_error\n";
            for (std::size_t i = 0; i < vals.size(); ++i) os << cfg.n_values[i] << ',' << detail::fmt17(vals[i]) << "\n";
        } else if (cfg.experiment == "constants") {
            std::ofstream os(dir / "constants.csv");
            os << "name,value\n";
            for (const auto& [name, value] : ledger_rows(ledger)) os << name << ',' << detail::fmt17(value) << "\n";
        } else if (cfg.experiment == "mlcheck") {
            std::ofstream os(dir / "mlcheck.csv");
            os << "identity,max_error,tolerance,pass\n";
            bool ok = true;
            for (const auto& r : ml_identity_checks()) {
                os << '"' << r.identity << "\"," << detail::fmt17(r.max_error) << ',' << detail::fmt17(r.tolerance) << ','
                   << (r.pass() ? 1 : 0) << "\n";
                ok = ok && r.pass();
            }
            if (!ok) {
                log << "mlcheck: identity tolerance exceeded\n";
                return exit_numerical;
            }
        }
    } catch (const ConvergenceError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const RangeError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const ConfigurationError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_ok;
}

} // namespace fgsim
