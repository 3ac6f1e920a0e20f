#pragma once

// Monte-Carlo experiments on coupled Galerkin approximations: all dimensions
// of one sample share the same Wiener path, and per-sample results are reduced
// in sample order so the output does not depend on thread scheduling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/noise.hpp"
#include "fgsim/parallel.hpp"
#include "fgsim/problem.hpp"
#include "fgsim/solver.hpp"

namespace fgsim {

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

namespace detail {

inline MCEstimate mean_stderr(const std::vector<double>& x)
{
    MCEstimate e;
    if (x.empty()) return e;
    for (double v : x) e.mean += v;
    e.mean /= static_cast<double>(x.size());
    if (x.size() > 1) {
        double var = 0.0;
        for (double v : x) var += (v - e.mean) * (v - e.mean);
        var /= static_cast<double>(x.size() - 1);
        e.stderr_ = std::sqrt(var / static_cast<double>(x.size()));
    }
    return e;
}

inline double sup_beta_sq(const ProblemSpec& spec, const PathSolution& a, const PathSolution& b)
{
    double best = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        best = std::max(best, h_beta_norm_sq(spec.spectrum, a.states[i] - b.states[i], {spec.beta}));
    return best;
}

} // namespace detail

/// Settings shared by the ensemble experiments.
struct EnsembleConfig {
    std::size_t samples = 200;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    PicardConfig picard;
};

/// Solves every requested Galerkin dimension on each sample path and hands
/// the results to `visit(sample_index, solutions_by_dimension)`.
template <class Visit>
void for_each_coupled_sample(const ProblemSpec& spec, const TimeGrid& grid, const std::vector<std::size_t>& dims,
                             const EnsembleConfig& ens, Visit&& visit)
{
    spec.validate();
    const Propagator prop(spec.family(), grid);
    parallel_for(
        ens.samples,
        [&](std::size_t s) {
            const WienerPath w = sample_wiener(spec.cov, grid.nodes, derive_seed(ens.seed, s));
            std::map<std::size_t, PathSolution> sols;
            for (std::size_t n : dims)
                if (!sols.count(n)) sols.emplace(n, solve(n, spec, w, grid, ens.picard, prop));
            visit(s, sols);
        },
        ens.threads);
}

/// E[sup_nodes ||y_n - y_m||_beta^2] over coupled samples.
inline MCEstimate pairwise_error(std::size_t n, std::size_t m, const ProblemSpec& spec, const TimeGrid& grid,
                                 const EnsembleConfig& ens)
{
    if (m > n || n > spec.modes()) throw ParameterError("pairwise_error: need m <= n <= modes");
    std::vector<double> per(ens.samples, 0.0);
    if (n == m) return {};
    for_each_coupled_sample(spec, grid, {n, m}, ens, [&](std::size_t s, const auto& sols) {
        per[s] = detail::sup_beta_sq(spec, sols.at(n), sols.at(m));
    });
    return detail::mean_stderr(per);
}

/// max{2M'Q_0/(1-2Q_0), 2D_{h1,k}M'/(1-2D_{h1,k}), 2M'Q_k/(1-2Q_k)} * lambda_m^{-2(eta-beta)}.
/// Returns +infinity when a denominator is not positive.
inline double theoretical_bound(std::size_t m, const ConstantsLedger& L, const ProblemSpec& spec)
{
    if (m >= spec.modes()) throw ParameterError("theoretical_bound: m must index a retained mode");
    double c = 0.0;
    auto take = [&](double x) {
        if (!(2.0 * x < 1.0)) c = std::numeric_limits<double>::infinity();
        else c = std::max(c, 2.0 * L.M_prime * x / (1.0 - 2.0 * x));
    };
    for (double q : L.Q) take(q);
    for (double d : L.in.D_h1) take(d);
    if (std::isinf(c)) return c;
    return c * std::pow(spec.spectrum.lambdas[m], -2.0 * (spec.eta - spec.beta));
}

struct ConvergenceRow {
    std::size_t m = 0;
    std::size_t n = 0;
    double lambda_m = 0.0;
    double error = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    bool feasible = false;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::size_t mc_samples = 0;
    std::uint64_t seed = 0;
    std::size_t steps_per_interval = 0;
    double D = 0.0;
    double M_prime = 0.0;
    // per-sample sup-node ||A^eta y_n||^2 over every dimension solved
    double eta_norm_mean = 0.0;
    double eta_norm_stderr = 0.0;
    double eta_norm_max = 0.0;
};

/// Pairwise errors for (m, ratio*m), m in m_values, on one coupled ensemble.
inline ConvergenceReport convergence_experiment(const ProblemSpec& spec, const TimeGrid& grid,
                                                const std::vector<std::size_t>& m_values, std::size_t ratio,
                                                const EnsembleConfig& ens, const ConstantsLedger& ledger)
{
    if (m_values.empty()) throw ParameterError("convergence_experiment: no m values");
    std::vector<std::size_t> dims;
    for (std::size_t m : m_values) {
        if (m * ratio > spec.modes()) throw ParameterError("convergence_experiment: ratio*m exceeds the modes");
        dims.push_back(m);
        dims.push_back(m * ratio);
    }
    const std::size_t k = m_values.size();
    std::vector<std::vector<double>> per(k, std::vector<double>(ens.samples, 0.0));
    std::vector<double> eta_sup(ens.samples, 0.0);
    for_each_coupled_sample(spec, grid, dims, ens, [&](std::size_t s, const auto& sols) {
        for (std::size_t i = 0; i < k; ++i)
            per[i][s] = detail::sup_beta_sq(spec, sols.at(m_values[i] * ratio), sols.at(m_values[i]));
        double e = 0.0;
        for (const auto& [n, sol] : sols)
            for (const auto& v : sol.states) e = std::max(e, h_beta_norm_sq(spec.spectrum, v, {spec.eta}));
        eta_sup[s] = e;
    });

    ConvergenceReport rep;
    rep.mc_samples = ens.samples;
    rep.seed = ens.seed;
    rep.steps_per_interval = grid.steps_per_interval;
    rep.D = ledger.D;
    rep.M_prime = ledger.M_prime;
    const auto feas = feasibility_check(ledger);
    for (std::size_t i = 0; i < k; ++i) {
        ConvergenceRow row;
        row.m = m_values[i];
        row.n = m_values[i] * ratio;
        row.lambda_m = spec.spectrum.lambdas[row.m];
        const auto est = detail::mean_stderr(per[i]);
        row.error = est.mean;
        row.stderr_ = est.stderr_;
        row.bound = theoretical_bound(row.m, ledger, spec);
        row.feasible = feas.feasible();
        rep.rows.push_back(row);
    }
    const auto eta = detail::mean_stderr(eta_sup);
    rep.eta_norm_mean = eta.mean;
    rep.eta_norm_stderr = eta.stderr_;
    rep.eta_norm_max = *std::max_element(eta_sup.begin(), eta_sup.end());
    return rep;
}

/// sup_nodes sum_{j<n} lambda_j^{2 beta} E|eta_j^n - eta_j^ref|^2 for each n in
/// n_values, with the n_ref solution standing in for the limit.
inline std::vector<double> coefficient_convergence(const std::vector<std::size_t>& n_values, std::size_t n_ref,
                                                   const ProblemSpec& spec, const TimeGrid& grid,
                                                   const EnsembleConfig& ens)
{
    for (std::size_t n : n_values)
        if (n > n_ref) throw ParameterError("coefficient_convergence: need n <= n_ref");
    if (n_ref > spec.modes()) throw ParameterError("coefficient_convergence: n_ref exceeds the modes");
    const std::size_t nodes = grid.size(), k = n_values.size();
    // per sample, per n, per node: weighted squared coefficient error
    std::vector<std::vector<std::vector<double>>> per(
        ens.samples, std::vector<std::vector<double>>(k, std::vector<double>(nodes, 0.0)));
    std::vector<std::size_t> dims = n_values;
    dims.push_back(n_ref);
    for_each_coupled_sample(spec, grid, dims, ens, [&](std::size_t s, const auto& sols) {
        const PathSolution& ref = sols.at(n_ref);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t n = n_values[i];
            const PathSolution& sol = sols.at(n);
            for (std::size_t t = 0; t < nodes; ++t) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = sol.states[t][j] - ref.states[t][j];
                    acc += std::pow(spec.spectrum.lambdas[j], 2.0 * spec.beta) * d * d;
                }
                per[s][i][t] = acc;
            }
        }
    });
    std::vector<double> out(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t t = 0; t < nodes; ++t) {
            double mean = 0.0;
            for (std::size_t s = 0; s < ens.samples; ++s) mean += per[s][i][t];
            out[i] = std::max(out[i], mean / static_cast<double>(ens.samples));
        }
    return out;
}

inline double coefficient_convergence(std::size_t n, std::size_t n_ref, const ProblemSpec& spec, const TimeGrid& grid,
                                      const EnsembleConfig& ens)
{
    return coefficient_convergence(std::vector<std::size_t>{n}, n_ref, spec, grid, ens).front();
}

/// Least-squares slope of log(error) against log(lambda_m).
inline double decay_slope(const ConvergenceReport& rep)
{
    std::vector<double> x, y;
    for (const auto& r : rep.rows)
        if (r.error > 0.0 && r.lambda_m > 0.0) {
            x.push_back(std::log(r.lambda_m));
            y.push_back(std::log(r.error));
        }
    if (x.size() < 3) throw InsufficientDataError("decay_slope: need at least 3 positive errors");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// Errors nonincreasing along the rows up to 3 standard errors.
inline bool cauchy_monotone(const ConvergenceReport& rep)
{
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i - 1];
        const auto& b = rep.rows[i];
        if (b.error > a.error + 3.0 * std::max(a.stderr_, b.stderr_)) return false;
    }
    return true;
}

/// error <= bound + 3 stderr on every row whose bound is finite.
inline bool bound_dominates(const ConvergenceReport& rep)
{
    for (const auto& r : rep.rows)
        if (std::isfinite(r.bound) && r.error > r.bound + 3.0 * r.stderr_) return false;
    return true;
}

inline void write_report_csv(std::ostream& os, const ConvergenceReport& rep)
{
    os << "# samples=" << rep.mc_samples << "\n";
    os << "# seed=" << rep.seed << "\n";
    os << "# steps_per_interval=" << rep.steps_per_interval << "\n";
    os << "# D=" << detail::fmt17(rep.D) << "\n";
    os << "# M_prime=" << detail::fmt17(rep.M_prime) << "\n";
    os << "m,n,lambda_m,error,stderr,bound,feasible\n";
    for (const auto& r : rep.rows)
        os << r.m << ',' << r.n << ',' << detail::fmt17(r.lambda_m) << ',' << detail::fmt17(r.error) << ','
           << detail::fmt17(r.stderr_) << ',' << detail::fmt17(r.bound) << ',' << (r.feasible ? 1 : 0) << "\n";
}

/// Log-log plot of error (points) and bound (line) against lambda_m, with a
/// dashed reference slope of -2(eta-beta) through the first error.
inline void write_report_svg(std::ostream& os, const ConvergenceReport& rep, double reference_slope)
{
    const double W = 480, H = 360, pad = 50;
    std::vector<double> xs, ys;
    for (const auto& r : rep.rows) {
        if (r.error > 0.0) {
            xs.push_back(std::log10(r.lambda_m));
            ys.push_back(std::log10(r.error));
        }
        if (std::isfinite(r.bound) && r.bound > 0.0) ys.push_back(std::log10(r.bound));
    }
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    if (xs.empty()) {
        os << "<text x=\"10\" y=\"20\">no positive errors</text>\n</svg>\n";
        return;
    }
    double x0 = *std::min_element(xs.begin(), xs.end()), x1 = *std::max_element(xs.begin(), xs.end());
    double y0 = *std::min_element(ys.begin(), ys.end()), y1 = *std::max_element(ys.begin(), ys.end());
    if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
    auto px = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
    auto py = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
    os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 - 60 << "\" y=\"" << H - 10 << "\">log10 lambda_m</text>\n";
    os << "<text x=\"5\" y=\"" << pad - 10 << "\">log10 error</text>\n";
    std::string bound_path;
    for (const auto& r : rep.rows) {
        if (r.error > 0.0)
            os << "<circle cx=\"" << px(std::log10(r.lambda_m)) << "\" cy=\"" << py(std::log10(r.error))
               << "\" r=\"4\" fill=\"steelblue\"/>\n";
        if (std::isfinite(r.bound) && r.bound > 0.0)
            bound_path += (bound_path.empty() ? "M" : " L") + std::to_string(px(std::log10(r.lambda_m))) + " " +
                          std::to_string(py(std::log10(r.bound)));
    }
    if (!bound_path.empty()) os << "<path d=\"" << bound_path << "\" stroke=\"firebrick\" fill=\"none\"/>\n";
    const double yr0 = ys.front(), yr1 = yr0 + reference_slope * (x1 - x0);
    os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(yr0) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yr1)
       << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    os << "</svg>\n";
}

} // namespace fgsim
